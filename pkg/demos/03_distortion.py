"""Deeper levels can beat the shallow CVTs (r = 0.4375).

The minimum distortion over C(3, 2^m) drops as m grows, and the dynamic
programme over all contiguous partitions confirms each level's minimum.
"""

from cantor_cvt import best_cvt, build_table, dp_optimal_blocks, enumerate_cvts, validate_params

model = validate_params(0.4375, 0.4375, 0.5)
for m in range(2, 9):
    table = build_table(model, m)
    cvts = enumerate_cvts(table, 3)
    best = best_cvt(cvts)
    part, cost = dp_optimal_blocks(table, 3)
    print(
        f"m={m}: {len(cvts):3d} CVTs, best {best.distortion:.7g} at {best.partition}; "
        f"DP optimum {cost:.7g}"
    )

print("\nall CVTs at level 5:")
for res in enumerate_cvts(build_table(model, 5), 3):
    cents = ", ".join(f"{c:.6g}" for c in res.centroids)
    print(f"  {str(res.partition):32s} {{{cents}}}  {res.distortion:.6g}")
