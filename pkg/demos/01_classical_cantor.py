"""Middle-thirds Cantor measure: which block partitions are CVTs?

Run with ``python demos/01_classical_cantor.py``.
"""

from fractions import Fraction

from cantor_cvt import build_table, enumerate_cvts, validate_params

model = validate_params(Fraction(1, 3), Fraction(1, 3), Fraction(1, 2))
print(f"mean {model.mean}, variance {model.variance}")

# Exact arithmetic: the two three-point CVTs at level 2 carry rational centroids.
for m in range(2, 6):
    cvts = enumerate_cvts(build_table(model, m), 3)
    print(f"\nlevel {m}: {len(cvts)} CVT(s) with three generators")
    for res in cvts:
        cents = ", ".join(str(c) for c in res.centroids)
        print(f"  {res.partition}  centroids {{{cents}}}  distortion {res.distortion}")

# At level 5 a third CVT shows up whose middle block straddles the central gap
# by one cylinder on each side; it is a CVT but not an optimal set of means.
print()
for m in range(2, 6):
    print(f"four generators, level {m}: {len(enumerate_cvts(build_table(model, m), 4))} CVT(s)")
