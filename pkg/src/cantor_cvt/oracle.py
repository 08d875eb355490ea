"""Independent cross-checks for the moment formulas and the CVT search.

Three routes that share nothing with the search code beyond the model
parameters (and, for the DP, the table's prefix sums):

* :func:`discretize` + :func:`lloyd` -- weighted 1-D Lloyd iteration on the
  level-``M`` conditional means ("atoms");
* :func:`dp_optimal_blocks` -- exact minimum over every contiguous block
  partition, by dynamic programming;
* :func:`moments_by_truncation` -- brute-force sums over all level-``M``
  cylinders using their midpoints, so the closed-form mean is never used.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCell, LevelTooLarge, NTooLarge
from .ifs_model import DEFAULT_LEVEL_CAP, IfsModel, partition_distortion
from .partition import BlockPartition

DP_LEVEL_CAP = 12


def _level_maps(source, M):
    if isinstance(source, IfsModel):
        return [source.maps] * M
    return [source.level(k) for k in range(1, M + 1)]


def _tail_mean_var(source, M):
    if isinstance(source, IfsModel):
        return source.mean, source.variance
    from .generalized import tail_moments

    tm = tail_moments(source).at(M)
    return tm[0], tm[2]


def _enumerate_maps(level_maps):
    """``(scale, offset, weight)`` arrays of every word, in spatial order.

    Words are enumerated as mixed-radix integers, digit by digit, without
    the parent/child interleaving used when building cylinder tables.
    """
    radices = [len(maps) for maps in level_maps]
    total = math.prod(radices)
    k = np.arange(total)
    scale = np.ones(total)
    offset = np.zeros(total)
    weight = np.ones(total)
    stride = total
    for maps, radix in zip(level_maps, radices):
        stride //= radix
        digit = (k // stride) % radix
        c = np.array([float(x[0]) for x in maps])[digit]
        b = np.array([float(x[1]) for x in maps])[digit]
        p = np.array([float(x[2]) for x in maps])[digit]
        offset = offset + scale * b
        scale = scale * c
        weight = weight * p
    return scale, offset, weight


@dataclass(frozen=True)
class AtomMeasure:
    """Point masses at the level-``M`` conditional means.

    ``within_cell_offset`` is the distortion every cylinder contributes
    about its own mean; it does not depend on how the cylinders are grouped.
    """

    positions: np.ndarray
    weights: np.ndarray
    within_cell_offset: float
    level: int = 0


def discretize(source, M, level_cap=DEFAULT_LEVEL_CAP):
    """Atoms ``S_sigma(E)`` with weights ``p_sigma`` for all words of length ``M``.

    ``source`` is an :class:`~cantor_cvt.ifs_model.IfsModel` or a
    :class:`~cantor_cvt.generalized.GeneralizedIfsSpec`.
    """
    if not 0 <= M <= level_cap:
        raise LevelTooLarge(f"M={M} outside 0..{level_cap}")
    maps = _level_maps(source, M)
    if math.prod(len(x) for x in maps) > 2**level_cap:
        raise LevelTooLarge(f"too many atoms at depth {M}")
    e, v = _tail_mean_var(source, M)
    scale, offset, weight = _enumerate_maps(maps)
    positions = offset + scale * float(e)
    offset_total = float(np.sum(weight * scale * scale)) * float(v)
    return AtomMeasure(positions, weight, offset_total, M)


@dataclass
class LloydResult:
    centroids: np.ndarray
    cuts: np.ndarray  # atom index where each cell after the first starts
    cost: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def _assign(atoms, centroids):
    mids = 0.5 * (centroids[1:] + centroids[:-1])
    # an atom sitting exactly on a midpoint goes to the left cell
    cuts = np.searchsorted(atoms.positions, mids, side="right")
    return cuts


def _cell_stats(atoms, cuts):
    x, w = atoms.positions, atoms.weights
    edges = np.concatenate(([0], cuts, [len(x)]))
    mass = np.add.reduceat(w, edges[:-1])
    first = np.add.reduceat(w * x, edges[:-1])
    empty = edges[1:] == edges[:-1]
    return edges, mass, first, empty


def _cost(atoms, centroids, cuts):
    labels = np.searchsorted(cuts, np.arange(len(atoms.positions)), side="right")
    d = atoms.positions - centroids[labels]
    return float(np.sum(atoms.weights * d * d)) + atoms.within_cell_offset


def lloyd(atoms, init, tol=1e-12, max_iter=1000, check_monotone=True):
    """Weighted Lloyd iteration on a sorted atom measure.

    Parameters
    ----------
    atoms : AtomMeasure
    init : array_like
        Strictly increasing starting generators.
    tol : float
        Stop once no generator moves more than ``tol``.
    max_iter : int
    check_monotone : bool
        Assert that the cost never increases (beyond rounding).

    Returns
    -------
    LloydResult
        ``cost`` includes ``atoms.within_cell_offset`` so it is directly
        comparable with :func:`~cantor_cvt.ifs_model.partition_distortion`.

    Raises
    ------
    EmptyCell
        Some generator has no atoms in its Voronoi cell.
    """
    c = np.asarray(init, dtype=float).copy()
    if c.ndim != 1 or c.size < 1 or np.any(np.diff(c) <= 0):
        raise ValueError("init must be a strictly increasing 1-D array")
    history = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        cuts = _assign(atoms, c)
        history.append(_cost(atoms, c, cuts))
        _, mass, first, empty = _cell_stats(atoms, cuts)
        if np.any(empty) or np.any(mass <= 0):
            raise EmptyCell(f"generator(s) {np.flatnonzero(empty).tolist()} captured no atoms")
        new = first / mass
        moved = float(np.max(np.abs(new - c)))
        c = new
        if moved < tol:
            converged = True
            break
    cuts = _assign(atoms, c)
    cost = _cost(atoms, c, cuts)
    history.append(cost)
    if check_monotone:
        steps = np.diff(history)
        assert np.all(steps <= 1e-14 * max(1.0, abs(history[0]))), "Lloyd cost increased"
    return LloydResult(c, cuts, cost, it, converged, history)


def quantile_init(atoms, n):
    """Weighted ``(k + 1/2)/n`` quantiles of the atoms."""
    cdf = np.cumsum(atoms.weights)
    cdf = cdf / cdf[-1]
    targets = (np.arange(n) + 0.5) / n
    idx = np.searchsorted(cdf, targets)
    init = atoms.positions[np.minimum(idx, len(cdf) - 1)]
    return np.unique(init)


def lloyd_restarts(atoms, n, restarts=8, seed=0, tol=1e-12, max_iter=1000):
    """Best Lloyd run over the quantile start plus ``restarts`` perturbed starts."""
    rng = np.random.default_rng(seed)
    base = quantile_init(atoms, n)
    starts = [base] if base.size == n else []
    lo, hi = float(atoms.positions[0]), float(atoms.positions[-1])
    for _ in range(restarts):
        starts.append(np.sort(rng.uniform(lo, hi, size=n)))
    best = None
    for s in starts:
        if s.size != n or np.any(np.diff(s) <= 0):
            continue
        try:
            res = lloyd(atoms, s, tol=tol, max_iter=max_iter)
        except EmptyCell:
            continue
        if best is None or res.cost < best.cost:
            best = res
    return best


def dp_optimal_blocks(table, n, dp_cap=DP_LEVEL_CAP, tie_tol=1e-14):
    """Minimum-distortion partition of ``table`` into ``n`` contiguous blocks.

    Suffix DP over ``g[l, i]`` = best cost of splitting cylinders
    ``i+1..N`` into ``l`` blocks, followed by a forward walk that takes the
    smallest admissible cut at each step, so ties resolve to the
    lexicographically smallest cut vector.

    Returns ``(BlockPartition, cost)``; the cost is recomputed from the
    table (exact for rational tables).
    """
    if table.level > dp_cap:
        raise LevelTooLarge(f"DP limited to level {dp_cap}, got {table.level}")
    N = table.size
    if not 1 <= n <= N:
        raise NTooLarge(f"n={n} not in 1..{N}")
    A = np.asarray(table.weight_prefix, dtype=float)
    B = np.asarray(table.first_moment_prefix, dtype=float)
    C = np.asarray(table.quadratic_prefix, dtype=float)

    def row(i):
        # cost of blocks [i+1, j] for j = i+1..N
        a = A[i + 1 :] - A[i]
        b = B[i + 1 :] - B[i]
        return np.maximum(C[i + 1 :] - C[i] - b * b / a, 0.0)

    g = np.full((n + 1, N + 1), np.inf)
    g[1, :N] = [row(i)[-1] for i in range(N)]
    for ell in range(2, n + 1):
        for i in range(N - ell + 1):
            # the block [i+1, j] ends at j <= N - (ell - 1)
            r = row(i)[: N - ell + 1 - i]
            g[ell, i] = np.min(r + g[ell - 1, i + 1 : N - ell + 2])
    cuts = []
    i = 0
    for ell in range(n, 1, -1):
        r = row(i)[: N - ell + 1 - i]
        tot = r + g[ell - 1, i + 1 : N - ell + 2]
        k = int(np.flatnonzero(tot <= tot.min() + tie_tol)[0])
        i = i + 1 + k
        cuts.append(i)
    part = BlockPartition(size=N, boundaries=tuple(cuts), level=table.level)
    return part, partition_distortion(table, part)


def moments_by_truncation(source, M, level_cap=DEFAULT_LEVEL_CAP):
    """``(E_est, M2_est, V_est)`` from all depth-``M`` cylinder midpoints.

    Each cylinder contributes ``p_sigma`` times its midpoint (and squared
    midpoint); the mean estimate is off by at most ``max s_sigma / 2``.

    Every word is split as ``head + tail``. With ``S_head(x) = o + s*x``
    the sum over all words factors into products of head sums and tail
    sums, so both halves are enumerated once instead of their product.
    """
    if not 0 <= M <= level_cap:
        raise LevelTooLarge(f"M={M} outside 0..{level_cap}")
    maps = _level_maps(source, M)
    logs = np.cumsum([math.log(len(x)) for x in maps])
    split = int(np.searchsorted(logs, logs[-1] / 2)) if M else 0
    hs, ho, hw = _enumerate_maps(maps[:split])
    ts, to, tw = _enumerate_maps(maps[split:])
    tail_mid = to + 0.5 * ts
    t0 = math.fsum(tw)
    t1 = math.fsum(tw * tail_mid)
    t2 = math.fsum(tw * tail_mid * tail_mid)
    e = math.fsum(hw * ho) * t0 + math.fsum(hw * hs) * t1
    m2 = (
        math.fsum(hw * ho * ho) * t0
        + 2 * math.fsum(hw * ho * hs) * t1
        + math.fsum(hw * hs * hs) * t2
    )
    return e, m2, m2 - e * e
