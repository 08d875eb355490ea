"""Cross-checking the search with methods that share none of its logic."""

import numpy as np

from cantor_cvt import (
    best_cvt,
    build_table,
    discretize,
    enumerate_cvts,
    lloyd,
    lloyd_restarts,
    moments_by_truncation,
    validate_params,
)

model = validate_params(0.25, 0.5, 0.25)
e, m2, v = moments_by_truncation(model, 25)
print(f"truncated moments at depth 25: E={e:.15f} V={v:.15f}")
print(f"closed form:                   E={model.mean:.15f} V={model.variance:.15f}")

# Every CVT is a fixed point of one Lloyd step on the level-m atoms.
m = 6
atoms = discretize(model, m)
for res in enumerate_cvts(build_table(model, m), 4):
    step = lloyd(atoms, res.centroids, max_iter=1)
    print(f"{str(res.partition):34s} moved {np.max(np.abs(step.centroids - res.centroids)):.1e}")

# Lloyd from random starts on a fine discretization lands on the best CVT.
fine = lloyd_restarts(discretize(model, 14), 4, restarts=12, seed=3)
best = best_cvt(enumerate_cvts(build_table(model, 6), 4))
print(f"\nLloyd best cost {fine.cost:.8f}; best CVT at level 6 {best.distortion:.8f}")
