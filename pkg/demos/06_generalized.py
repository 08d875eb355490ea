"""Maps that change with the level: alternate thirds and quarters.

Level 1 uses ratio 1/3, level 2 ratio 1/4, and so on forever. The tail
measures alternate as well, so the moments come from a two-step fixed
point; truncated sums check them independently.
"""

from fractions import Fraction as F

from cantor_cvt import (
    GeneralizedIfsSpec,
    build_table_generalized,
    enumerate_cvts,
    find_cvts_generalized,
    moments_by_truncation,
    tail_moments,
)

thirds = ((F(1, 3), F(0), F(1, 2)), (F(1, 3), F(2, 3), F(1, 2)))
quarters = ((F(1, 4), F(0), F(1, 2)), (F(1, 4), F(3, 4), F(1, 2)))
spec = GeneralizedIfsSpec(preamble=(), period=(thirds, quarters))

tm = tail_moments(spec)
print("tail variances (depth 0, 1):", [str(v) for v in tm.variance])
print("truncated sums, depth 20:   ", moments_by_truncation(spec, 20))

m, res = find_cvts_generalized(spec, 3)
print(f"\nfirst level with a three-point CVT: {m}")
for r in res:
    print(" ", r.partition, [str(c) for c in r.centroids], r.distortion)

# A three-map first level followed by middle thirds: 3 * 2^(m-1) cylinders.
triple = ((F(1, 5), F(0), F(1, 4)), (F(1, 5), F(2, 5), F(1, 2)), (F(1, 5), F(4, 5), F(1, 4)))
mixed = GeneralizedIfsSpec(preamble=(triple,), period=(thirds,))
for m in (1, 2, 3):
    table = build_table_generalized(mixed, m)
    print(f"\nmixed spec, depth {m}: {table.size} cylinders,"
          f" {len(enumerate_cvts(table, 3))} three-point CVT(s)")
