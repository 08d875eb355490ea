"""Enumeration of centroidal Voronoi tessellations built from cylinder blocks.

A partition of the level-``m`` cylinders ``1..N`` into ``n`` contiguous
blocks is a CVT (P-a.s.) when, at every cut ``b``, the midpoint of the two
neighbouring block centroids falls in the closed gap between cylinder ``b``
and cylinder ``b + 1``. The search picks cuts left to right and, because a
block's centroid grows monotonically as the block is extended to the right,
the admissible positions of each cut form one contiguous run that is
located by binary search.
"""

import math
import os
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    EmptyList,
    LevelTooLarge,
    NoCvtFoundUpToMMax,
    NTooLarge,
    SymmetryPruningInvalid,
)
from .ifs_model import DEFAULT_LEVEL_CAP, build_table
from .partition import BlockPartition

__all__ = [
    "BlockPartition",
    "CvtResult",
    "SearchConfig",
    "best_cvt",
    "enumerate_cvts",
    "find_cvts",
    "gap_condition",
    "lift_partition",
    "reflect_partition",
]

DEFAULT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for :func:`enumerate_cvts` and :func:`find_cvts`.

    ``tolerance=None`` means 1e-12 for float tables and 0 for exact ones.
    """

    tolerance: float = None
    symmetry_pruning: bool = False
    m_start: int = 1
    m_max: int = 16
    parallel: bool = False
    workers: int = None
    level_cap: int = DEFAULT_LEVEL_CAP

    def __post_init__(self):
        if self.tolerance is not None and self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if not 1 <= self.m_start <= self.m_max <= self.level_cap:
            raise LevelTooLarge(
                f"need 1 <= m_start ({self.m_start}) <= m_max ({self.m_max})"
                f" <= level cap ({self.level_cap})"
            )

    def eps_for(self, table):
        if self.tolerance is None:
            return 0 if table.exact else DEFAULT_TOLERANCE
        if table.exact:
            return Fraction(self.tolerance)
        return float(self.tolerance)


@dataclass(frozen=True)
class CvtResult:
    partition: BlockPartition
    centroids: tuple
    distortion: float
    boundary_points: tuple

    @property
    def n(self):
        return self.partition.n

    @property
    def blocks(self):
        return self.partition.blocks

    @property
    def boundaries(self):
        return self.partition.boundaries


def gap_condition(table, c_left, c_right, boundary, eps=DEFAULT_TOLERANCE):
    """Whether ``(c_left + c_right) / 2`` lies in the closed gap after cylinder ``boundary``.

    The gap runs from the right end of cylinder ``boundary`` to the left
    end of cylinder ``boundary + 1``, widened by ``eps`` on both sides.
    """
    mid = (c_left + c_right) / 2
    return table.right[boundary - 1] - eps <= mid <= table.left[boundary] + eps


def _make_result(table, cuts):
    n = len(cuts) - 1
    cents = tuple(table.centroid(cuts[k] + 1, cuts[k + 1]) for k in range(n))
    dist = table.variance * 0
    for k in range(n):
        dist = dist + table.centroid_cost(cuts[k] + 1, cuts[k + 1])
    mids = tuple((cents[k] + cents[k + 1]) / 2 for k in range(n - 1))
    part = BlockPartition(size=table.size, boundaries=tuple(cuts[1:-1]), level=table.level)
    return CvtResult(part, cents, dist, mids)


def _search(table, n, eps, first_cuts, sym):
    """Depth-first search over cut positions; ``first_cuts`` restricts ``i_1``."""
    N = table.size
    R, L = table.right, table.left
    centroid = table.centroid
    cuts = [0] * (n + 1)
    cuts[n] = N
    cents = [None] * n
    found = []

    def emit():
        if sym and cuts[1] == N - cuts[n - 1]:
            mine = cuts[1:n]
            mirrored = [N - b for b in reversed(mine)]
            if mirrored < mine:
                return
        found.append(_make_result(table, cuts))

    def descend(ell):
        # cuts[ell-1] is the cut being tested; we choose the end of block ell
        b = cuts[ell - 1]
        s = b + 1
        cprev = cents[ell - 2]
        lo = R[b - 1] - eps
        hi = L[b] + eps
        if ell == n:
            c = centroid(s, N)
            mid = (cprev + c) / 2
            if lo <= mid <= hi:
                cents[n - 1] = c
                emit()
            return
        top = N - (n - ell)
        if sym:
            top = min(top, N - cuts[1])
        if top < s:
            return
        span = range(s, top + 1)
        j0 = s + bisect_left(span, True, key=lambda j: (cprev + centroid(s, j)) / 2 >= lo)
        if j0 > top:
            return
        j1 = j0 + bisect_left(
            range(j0, top + 1), True, key=lambda j: (cprev + centroid(s, j)) / 2 > hi
        )
        for j in range(j0, j1):
            cuts[ell] = j
            cents[ell - 1] = centroid(s, j)
            descend(ell + 1)

    for i1 in first_cuts:
        cuts[1] = i1
        cents[0] = centroid(1, i1)
        if n == 1:
            found.append(_make_result(table, [0, N]))
        else:
            descend(2)
    return found


def _search_chunk(args):
    table, n, eps, lo, hi, sym = args
    return _search(table, n, eps, range(lo, hi), sym)


def enumerate_cvts(table, n, config=None):
    """All CVTs with ``n`` generators made of blocks of ``table``'s cylinders.

    Returns the complete set C(n, N) as :class:`CvtResult` objects ordered
    lexicographically by their cut vectors. An empty list is a normal
    outcome.

    Raises
    ------
    NTooLarge
        ``n`` exceeds the number of cylinders (or is < 1).
    SymmetryPruningInvalid
        ``config.symmetry_pruning`` is set for a non-symmetric measure.
    """
    config = config or SearchConfig()
    N = table.size
    if not 1 <= n <= N:
        raise NTooLarge(f"n={n} not in 1..{N}")
    sym = bool(config.symmetry_pruning)
    if sym and not table.symmetric:
        raise SymmetryPruningInvalid("symmetry pruning needs a reflection-symmetric measure")
    sym = sym and n >= 2
    eps = config.eps_for(table)

    last_first = N - n + 1 if n > 1 else 1
    if sym:
        last_first = min(last_first, N // 2)

    if config.parallel and last_first > 64:
        workers = config.workers or os.cpu_count() or 1
        step = max(1, math.ceil(last_first / (4 * workers)))
        chunks = [
            (table, n, eps, lo, min(lo + step, last_first + 1), sym)
            for lo in range(1, last_first + 1, step)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            found = [r for part in pool.map(_search_chunk, chunks) for r in part]
    else:
        found = _search(table, n, eps, range(1, last_first + 1), sym)

    if sym:
        seen = {r.partition.boundaries for r in found}
        for r in list(found):
            mirrored = reflect_partition(r.partition)
            if mirrored.boundaries not in seen:
                seen.add(mirrored.boundaries)
                found.append(_make_result(table, mirrored.cuts))
    found.sort(key=lambda r: r.partition.boundaries)
    return found


def min_level(n, radix=2):
    """Smallest ``m`` with ``n <= radix**m`` (and ``m >= 1``)."""
    m = 1
    while radix**m < n:
        m += 1
    return m


def escalate(make_table, n, config, start):
    """Raise the level until a level yields CVTs; returns ``(m, results)``."""
    m = max(config.m_start, start)
    while m <= config.m_max:
        table = make_table(m)
        if table.size >= n:
            results = enumerate_cvts(table, n, config)
            if results:
                return m, results
        m += 1
    raise NoCvtFoundUpToMMax(n, config.m_max)


def find_cvts(model, n, config=None):
    """Run the level escalation: the first level ``m`` whose CVT set is non-empty.

    ``config.m_start`` is raised to the smallest ``m`` with ``n <= 2**m``.
    """
    config = config or SearchConfig()
    if config.m_max < min_level(n):
        raise NTooLarge(f"n={n} needs m >= {min_level(n)} but m_max={config.m_max}")
    return escalate(
        lambda m: build_table(model, m, config.level_cap), n, config, min_level(n)
    )


def best_cvt(results, tolerance=DEFAULT_TOLERANCE):
    """Minimum-distortion result; near-ties go to the smallest cut vector."""
    if not results:
        raise EmptyList("best_cvt needs at least one result")
    low = min(r.distortion for r in results)
    tied = [r for r in results if r.distortion <= low + tolerance]
    return min(tied, key=lambda r: r.partition.boundaries)


def _level_of(partition):
    if partition.level is not None:
        return partition.level
    m = partition.size.bit_length() - 1
    if 2**m != partition.size:
        raise ValueError(f"partition size {partition.size} is not a power of two")
    return m


def lift_partition(partition, extra_levels, level_cap=DEFAULT_LEVEL_CAP):
    """Same subsets of the Cantor set expressed ``extra_levels`` levels deeper."""
    m = _level_of(partition) + extra_levels
    if extra_levels < 0 or m > level_cap:
        raise LevelTooLarge(f"cannot lift to level {m} (cap {level_cap})")
    f = 2**extra_levels
    return BlockPartition(
        size=partition.size * f, boundaries=tuple(b * f for b in partition.boundaries), level=m
    )


def reflect_partition(partition):
    """Mirror image under ``x -> 1 - x``: cut ``b`` becomes ``N - b``."""
    N = partition.size
    return BlockPartition(
        size=N, boundaries=tuple(N - b for b in reversed(partition.boundaries)), level=partition.level
    )
