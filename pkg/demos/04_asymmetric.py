"""A non-symmetric measure: r1 = 1/4, r2 = 1/2, weights 1/4 and 3/4."""

from fractions import Fraction as F

from cantor_cvt import best_cvt, build_table, enumerate_cvts, validate_params

model = validate_params(F(1, 4), F(1, 2), F(1, 4))
print(f"E = {model.mean}, E(X^2) = {model.second_moment}, V = {model.variance}")

for n, m in [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)]:
    cvts = enumerate_cvts(build_table(model, m), n)
    print(f"\nn={n}, level {m}:")
    for res in cvts:
        cents = ", ".join(f"{float(c):.6g}" for c in res.centroids)
        print(f"  {{{cents}}}  distortion {float(res.distortion):.6g}")
    print(f"  best: {float(best_cvt(cvts).distortion):.6g}")
