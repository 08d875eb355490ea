"""Two-map self-similar Cantor measures on [0, 1].

The measure ``P`` is the invariant measure of ``S1(x) = r1*x`` and
``S2(x) = r2*x + (1 - r2)`` with weights ``(p1, p2)``. Everything here is a
field operation on the parameters, so passing :class:`fractions.Fraction`
inputs (or ``rational=True``) keeps every quantity exact.

Level-``m`` cylinders ``J_sigma = S_sigma([0, 1])`` are numbered ``1..2**m``
left to right; :class:`CylinderTable` stores three prefix sums over them so
that block centroids and block distortions are O(1) queries.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple

import numpy as np

from .errors import (
    IndexOutOfRange,
    LevelTooLarge,
    OverlappingCylinders,
    ParamOutOfRange,
    PartitionMismatch,
)

DEFAULT_LEVEL_CAP = 26


def _to_number(x, exact):
    if isinstance(x, str):
        x = Fraction(x.strip())
    if exact:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)


@dataclass(frozen=True)
class IfsModel:
    """Parameters of the measure plus its first two moments.

    Build instances through :func:`validate_params`; the constructor does
    not check anything.
    """

    r1: float
    r2: float
    p1: float
    p2: float
    mean: float
    second_moment: float
    variance: float
    allow_degenerate_gaps: bool = False

    @property
    def exact(self):
        return isinstance(self.r1, Fraction)

    @property
    def symmetric(self):
        return self.r1 == self.r2 and self.p1 == self.p2

    @property
    def maps(self):
        """``((scale, offset, prob), ...)`` for ``S1`` and ``S2``."""
        one = self.r1 * 0 + 1
        return ((self.r1, self.r1 * 0, self.p1), (self.r2, one - self.r2, self.p2))

    def params(self):
        return {"r1": self.r1, "r2": self.r2, "p1": self.p1}


def validate_params(r1, r2, p1, allow_degenerate_gaps=False, rational=None):
    """Check ``(r1, r2, p1)`` and return an :class:`IfsModel` with moments.

    Parameters
    ----------
    r1, r2 : number or str
        Contraction ratios. Strings such as ``"4/9"`` are parsed exactly.
    p1 : number or str
        Weight of the left map; ``p2 = 1 - p1``.
    allow_degenerate_gaps : bool
        Admit ``r1 + r2 == 1`` (touching cylinders).
    rational : bool, optional
        Force exact :class:`~fractions.Fraction` arithmetic. By default the
        model is exact iff every input is a ``Fraction``/``int`` or string.

    Raises
    ------
    ParamOutOfRange
        A ratio or ``p1`` is outside ``(0, 1)``.
    OverlappingCylinders
        ``r1 + r2 > 1``, or ``== 1`` without ``allow_degenerate_gaps``.
    """
    if rational is None:
        rational = all(isinstance(x, (Rational, str)) for x in (r1, r2, p1))
    try:
        r1, r2, p1 = (_to_number(x, rational) for x in (r1, r2, p1))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParamOutOfRange(f"cannot parse parameters: {exc}") from None
    for name, val in (("r1", r1), ("r2", r2), ("p1", p1)):
        if not 0 < val < 1:
            raise ParamOutOfRange(f"{name}={val} must lie in (0, 1)")
    total = r1 + r2
    if total > 1 or (total == 1 and not allow_degenerate_gaps):
        raise OverlappingCylinders(
            f"r1 + r2 = {total}; cylinders overlap"
            + ("" if total > 1 else " (pass allow_degenerate_gaps to admit touching cylinders)")
        )
    p2 = 1 - p1
    mean = _expectation(r1, r2, p1, p2)
    m2 = _second_moment(r1, r2, p1, p2)
    var = m2 - mean * mean
    if var < 0:
        var = var * 0
    return IfsModel(r1, r2, p1, p2, mean, m2, var, bool(allow_degenerate_gaps))


def _expectation(r1, r2, p1, p2):
    return p2 * (1 - r2) / (1 - p1 * r1 - p2 * r2)


def _second_moment(r1, r2, p1, p2):
    num = p2 * (r2 - 1) ** 2 * (-p1 * r1 + p2 * r2 + 1)
    den = (p1 * r1 + p2 * r2 - 1) * (p1 * r1**2 + p2 * r2**2 - 1)
    return num / den


def expectation(model):
    """E(X) from the fixed-point equation ``E = p1*S1(E) + p2*S2(E)``."""
    return model.mean


def second_moment(model):
    """E(X^2)."""
    return model.second_moment


def variance(model):
    """``E(X^2) - E(X)^2``.

    The subtraction is used on purpose instead of a closed-form variance
    expression; see the package README for the reason.
    """
    return model.variance


# --- words -------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A finite word over ``{1, 2}``; the empty word is allowed."""

    digits: tuple = ()

    def __post_init__(self):
        d = tuple(int(x) for x in self.digits)
        if any(x not in (1, 2) for x in d):
            raise ValueError(f"word digits must be 1 or 2, got {d}")
        object.__setattr__(self, "digits", d)

    @property
    def length(self):
        return len(self.digits)

    def __len__(self):
        return len(self.digits)

    def __add__(self, other):
        return Word(self.digits + tuple(other.digits))


def word_from_index(m, i):
    """Level-``m`` word with 1-based spatial index ``i``.

    >>> word_from_index(3, 1).digits
    (1, 1, 1)
    >>> word_from_index(2, 3).digits
    (2, 1)
    """
    if m < 0 or not 1 <= i <= 2**m:
        raise IndexOutOfRange(f"index {i} outside 1..{2 ** m}")
    k = i - 1
    return Word(tuple(((k >> (m - 1 - t)) & 1) + 1 for t in range(m)))


def index_from_word(word):
    k = 0
    for d in word.digits:
        k = 2 * k + (d - 1)
    return k + 1


class Cylinder(NamedTuple):
    left: float
    right: float
    scale: float
    weight: float
    centroid: float


def compose(maps, digits):
    """Fold ``S_d1 o S_d2 o ... o S_dk`` into one ``(scale, offset, weight)``.

    ``maps[d-1]`` is the ``(scale, offset, prob)`` triple of letter ``d``.
    """
    one = maps[0][0] * 0 + 1
    scale, offset, weight = one, one * 0, one
    for d in digits:
        c, b, p = maps[d - 1]
        offset = offset + scale * b
        scale = scale * c
        weight = weight * p
    return scale, offset, weight


def cylinder(model, word):
    """Geometry, weight and conditional mean of ``J_word``."""
    if not isinstance(word, Word):
        word = Word(tuple(word))
    scale, offset, weight = compose(model.maps, word.digits)
    return Cylinder(offset, offset + scale, scale, weight, offset + scale * model.mean)


# --- cylinder table ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CylinderTable:
    """Level-``m`` cylinders with prefix sums for O(1) block queries.

    Arrays ``left``/``right`` have length ``size`` (index ``k`` holds
    cylinder ``k + 1``). The prefix arrays have length ``size + 1`` with a
    leading zero, so the 1-based block ``[i, j]`` sums to
    ``X[j] - X[i - 1]``:

    * ``weight_prefix``       sums ``p_sigma``
    * ``first_moment_prefix`` sums ``p_sigma * S_sigma(E)``
    * ``quadratic_prefix``    sums ``p_sigma * (s_sigma**2 * V + S_sigma(E)**2)``
    """

    level: int
    size: int
    left: np.ndarray
    right: np.ndarray
    weight_prefix: np.ndarray
    first_moment_prefix: np.ndarray
    quadratic_prefix: np.ndarray
    variance: float
    symmetric: bool = False
    exact: bool = False

    # short aliases used by the search code
    @property
    def A(self):
        return self.weight_prefix

    @property
    def B(self):
        return self.first_moment_prefix

    @property
    def C(self):
        return self.quadratic_prefix

    def _check(self, i, j):
        if not 1 <= i <= j <= self.size:
            raise IndexOutOfRange(f"block [{i}, {j}] outside 1..{self.size}")

    def mass(self, i, j):
        return self.weight_prefix[j] - self.weight_prefix[i - 1]

    def centroid(self, i, j):
        """Unchecked :func:`block_centroid`."""
        A, B = self.weight_prefix, self.first_moment_prefix
        return (B[j] - B[i - 1]) / (A[j] - A[i - 1])

    def centroid_cost(self, i, j):
        """Unchecked distortion of block ``[i, j]`` at its own centroid."""
        A, B, C = self.weight_prefix, self.first_moment_prefix, self.quadratic_prefix
        a = A[j] - A[i - 1]
        b = B[j] - B[i - 1]
        d = C[j] - C[i - 1] - b * b / a
        return d if d > 0 else d * 0

    def centroids_to(self, i, js):
        """Vectorised ``centroid(i, j)`` for an array of ``j``."""
        A, B = self.weight_prefix, self.first_moment_prefix
        return (B[js] - B[i - 1]) / (A[js] - A[i - 1])


def _grow(scale, offset, weight, maps):
    """Children of every cylinder, interleaved in spatial order."""
    k = len(maps)
    n = len(scale)
    dtype = scale.dtype
    s2 = np.empty(n * k, dtype=dtype)
    o2 = np.empty(n * k, dtype=dtype)
    w2 = np.empty(n * k, dtype=dtype)
    for j, (c, b, p) in enumerate(maps):
        s2[j::k] = scale * c
        o2[j::k] = offset + scale * b
        w2[j::k] = weight * p
    return s2, o2, w2


def _refine_prefix(prefix, terms, k):
    """Prefix sums at the child level from parent prefix sums.

    Each child prefix is the parent prefix plus at most ``k - 1`` child
    terms, so float error grows by O(k) roundings per level instead of
    O(N) for a plain cumulative sum. Totals and every parent-aligned
    prefix are inherited unchanged.
    """
    n = len(prefix) - 1
    out = np.empty(n * k + 1, dtype=prefix.dtype)
    out[0::k] = prefix
    run = prefix[:-1].copy()
    for j in range(k - 1):
        run = run + terms[j::k]
        out[j + 1 :: k] = run
    return out


def _build(level_maps, moments, exact, symmetric):
    """Shared builder for the two-map and the level-dependent cases.

    ``level_maps[t]`` holds the maps applied at depth ``t + 1``;
    ``moments(t)`` returns ``(E_t, V_t)`` of the tail measure below depth ``t``.
    """
    m = len(level_maps)
    dtype = object if exact else np.float64
    one = Fraction(1) if exact else 1.0
    scale = np.array([one], dtype=dtype)
    offset = np.array([one * 0], dtype=dtype)
    weight = np.array([one], dtype=dtype)
    e0, v0 = moments(0)
    A = np.array([one * 0, one], dtype=dtype)
    B = np.array([one * 0, e0], dtype=dtype)
    C = np.array([one * 0, v0 + e0 * e0], dtype=dtype)
    for t in range(m):
        maps = level_maps[t]
        scale, offset, weight = _grow(scale, offset, weight, maps)
        e, v = moments(t + 1)
        cent = offset + scale * e
        b_terms = weight * cent
        c_terms = weight * (scale * scale * v + cent * cent)
        k = len(maps)
        A = _refine_prefix(A, weight, k)
        B = _refine_prefix(B, b_terms, k)
        C = _refine_prefix(C, c_terms, k)
    return CylinderTable(
        level=m,
        size=len(scale),
        left=offset,
        right=offset + scale,
        weight_prefix=A,
        first_moment_prefix=B,
        quadratic_prefix=C,
        variance=moments(m)[1],
        symmetric=symmetric,
        exact=exact,
    )


def build_table(model, m, level_cap=DEFAULT_LEVEL_CAP):
    """Level-``m`` :class:`CylinderTable` for a two-map model.

    Raises
    ------
    LevelTooLarge
        ``m < 1`` or ``m > level_cap``.
    """
    if not 1 <= m <= level_cap:
        raise LevelTooLarge(f"level m={m} outside 1..{level_cap}")
    maps = model.maps
    return _build(
        [maps] * m,
        lambda t: (model.mean, model.variance),
        model.exact,
        model.symmetric,
    )


def block_centroid(table, i, j):
    """Conditional mean of ``P`` on the union of cylinders ``i..j``."""
    table._check(i, j)
    return table.centroid(i, j)


def block_distortion(table, i, j, x0):
    """``sum_{sigma in [i, j]} p_sigma * (s_sigma**2 V + (S_sigma(E) - x0)**2)``."""
    table._check(i, j)
    A, B, C = table.weight_prefix, table.first_moment_prefix, table.quadratic_prefix
    a = A[j] - A[i - 1]
    b = B[j] - B[i - 1]
    c = C[j] - C[i - 1]
    return c - 2 * x0 * b + x0 * x0 * a


def partition_distortion(table, partition):
    """Total distortion of ``partition`` with every block quantised to its centroid."""
    if partition.size != table.size:
        raise PartitionMismatch(
            f"partition covers 1..{partition.size}, table has {table.size} cylinders"
        )
    total = table.variance * 0
    for i, j in partition.blocks:
        total = total + table.centroid_cost(i, j)
    return total
