"""Three generators across the symmetric family r in [0.30, 0.50].

For each r the script lists how many CVTs exist at level ``M`` and which
cut vectors are optimal. Up to about r = 0.43 the optimum is always the
split into one half and two quarters (or its mirror image); above that,
other CVTs take over, and close to r = 1/2 none exist at a finite level
because the Lebesgue optimum cuts at 1/3 and 2/3.

Pass a level as the first argument (default 10; level 12 takes ~10 s).
"""

import sys
from concurrent.futures import ProcessPoolExecutor

from cantor_cvt import SearchConfig, best_cvt, build_table, enumerate_cvts, validate_params

M = int(sys.argv[1]) if len(sys.argv) > 1 else 10
N = 2**M
half_quarter = {(N // 4, N // 2), (N // 2, 3 * N // 4)}


def point(k):
    r = round(0.30 + 0.005 * k, 3)
    model = validate_params(r, r, 0.5, allow_degenerate_gaps=r == 0.5)
    cvts = enumerate_cvts(build_table(model, M), 3, SearchConfig(symmetry_pruning=True))
    if not cvts:
        return r, 0, None, []
    best = best_cvt(cvts)
    opt = [c.boundaries for c in cvts if c.distortion <= best.distortion + 1e-12]
    return r, len(cvts), best, opt


if __name__ == "__main__":
    with ProcessPoolExecutor() as pool:
        rows = list(pool.map(point, range(41)))
    print(f"level {M}: r, #CVTs, optimal distortion, first Voronoi boundary, kind")
    for r, count, best, opt in rows:
        if best is None:
            print(f"{r:.3f} {count:4d}  (none)")
            continue
        kind = "half/quarter" if set(opt) <= half_quarter else "other"
        print(
            f"{r:.3f} {count:4d}  {best.distortion:.8f}  {best.boundary_points[0]:.6f}  {kind}"
        )
