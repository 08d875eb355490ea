"""Level escalation when coarse levels admit no CVT at all.

With contraction 4/9 the gaps are narrow, and three blocks cannot be
arranged so that both Voronoi midpoints fall in gaps until level 4.
"""

from cantor_cvt import NoCvtFoundUpToMMax, SearchConfig, build_table, enumerate_cvts
from cantor_cvt import find_cvts, validate_params

model = validate_params(4 / 9, 4 / 9, 0.5)
for m in (2, 3, 4, 5):
    found = enumerate_cvts(build_table(model, m), 3)
    print(f"level {m}: {len(found)} CVT(s)")

m, results = find_cvts(model, 3)
print(f"\nescalation stops at level {m}")
for res in results:
    print(" ", res.partition, [f"{c:.6g}" for c in res.centroids])

try:
    find_cvts(model, 3, SearchConfig(m_max=3))
except NoCvtFoundUpToMMax as exc:
    print(f"\nwith m_max=3: {exc}")
