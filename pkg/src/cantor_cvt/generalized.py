"""Cantor-like measures whose maps change from level to level.

Level ``k`` carries ``n_k >= 2`` similarities ``x -> c*x + b`` with
probabilities; a word ``j_1 j_2 ... j_m`` addresses the cylinder
``S_{1 j_1} o S_{2 j_2} o ... o S_{m j_m}([0, 1])``. The level sequence is a
finite preamble followed by a period repeated forever, which makes the
moments of every tail measure computable exactly.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple

from .cvt_search import SearchConfig, escalate
from .errors import LevelTooLarge, NTooLarge, SpecInvalid
from .ifs_model import DEFAULT_LEVEL_CAP, _build, _expectation, _second_moment


class AffineMap(NamedTuple):
    scale: float
    offset: float
    prob: float


def _num(x, exact):
    if isinstance(x, str):
        x = Fraction(x.strip())
    return Fraction(x) if exact else float(x)


def _check_level(level, where):
    if len(level) < 2:
        raise SpecInvalid(f"{where}: need at least two maps, got {len(level)}")
    total_p = sum(m.prob for m in level)
    if isinstance(total_p, Fraction):
        ok = total_p == 1
    else:
        ok = abs(total_p - 1) <= 1e-12
    if not ok:
        raise SpecInvalid(f"{where}: probabilities sum to {total_p}, not 1")
    if not sum(m.scale for m in level) < 1:
        raise SpecInvalid(f"{where}: contraction ratios must sum to less than 1")
    prev_right = None
    for j, m in enumerate(level):
        if not 0 < m.prob < 1:
            raise SpecInvalid(f"{where}, map {j + 1}: probability {m.prob} not in (0, 1)")
        if not 0 < m.scale < 1:
            raise SpecInvalid(f"{where}, map {j + 1}: scale {m.scale} not in (0, 1)")
        left, right = m.offset, m.offset + m.scale
        if left < 0 or right > 1:
            raise SpecInvalid(f"{where}, map {j + 1}: image [{left}, {right}] leaves [0, 1]")
        if prev_right is not None and left < prev_right:
            raise SpecInvalid(f"{where}, map {j + 1}: images out of order or overlapping")
        prev_right = right


@dataclass(frozen=True)
class GeneralizedIfsSpec:
    """Eventually periodic sequence of map families.

    ``preamble`` and ``period`` are tuples of levels; each level is a tuple
    of :class:`AffineMap`, ordered left to right. Use :meth:`from_dict`,
    :meth:`load` or :meth:`constant` rather than the raw constructor when
    reading user input.
    """

    preamble: tuple
    period: tuple

    def __post_init__(self):
        pre = tuple(tuple(AffineMap(*m) for m in lvl) for lvl in self.preamble)
        per = tuple(tuple(AffineMap(*m) for m in lvl) for lvl in self.period)
        object.__setattr__(self, "preamble", pre)
        object.__setattr__(self, "period", per)
        if not per:
            raise SpecInvalid("period must contain at least one level")
        for k, lvl in enumerate(pre):
            _check_level(lvl, f"preamble level {k + 1}")
        for k, lvl in enumerate(per):
            _check_level(lvl, f"period level {k + 1}")

    @property
    def exact(self):
        return all(
            isinstance(x, Fraction) for lvl in self.preamble + self.period for m in lvl for x in m
        )

    def level(self, k):
        """Maps applied at depth ``k`` (1-based)."""
        if k < 1:
            raise ValueError("levels are numbered from 1")
        P = len(self.preamble)
        if k <= P:
            return self.preamble[k - 1]
        return self.period[(k - P - 1) % len(self.period)]

    def radices(self, m):
        return [len(self.level(k)) for k in range(1, m + 1)]

    def size(self, m):
        return math.prod(self.radices(m))

    @property
    def symmetric(self):
        """Every level is invariant under ``x -> 1 - x`` (maps and weights)."""
        for lvl in self.preamble + self.period:
            for a, b in zip(lvl, reversed(lvl)):
                if a.scale != b.scale or a.prob != b.prob or a.offset != 1 - b.offset - b.scale:
                    return False
        return True

    @classmethod
    def constant(cls, model):
        """The two-map model as a one-level period."""
        return cls(preamble=(), period=(tuple(AffineMap(*m) for m in model.maps),))

    @classmethod
    def from_dict(cls, data, rational=None):
        """Parse ``{"preamble": [...], "period": [...]}``.

        Each level is a list of ``{"scale", "offset", "prob"}`` objects; values
        may be numbers or strings such as ``"1/3"``. With ``rational=None`` the
        spec is exact iff every value is a string or an integer.
        """
        try:
            levels = list(data.get("preamble", [])) + list(data["period"])
            values = [m[k] for lvl in levels for m in lvl for k in ("scale", "offset", "prob")]
            if rational is None:
                rational = all(isinstance(v, (str, Rational)) for v in values)

            def conv(lvls):
                return tuple(
                    tuple(
                        AffineMap(
                            _num(m["scale"], rational),
                            _num(m["offset"], rational),
                            _num(m["prob"], rational),
                        )
                        for m in lvl
                    )
                    for lvl in lvls
                )

            return cls(conv(data.get("preamble", [])), conv(data["period"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, SpecInvalid):
                raise
            raise SpecInvalid(f"malformed spec document: {exc!r}") from None

    @classmethod
    def load(cls, path, rational=None):
        with open(path) as fh:
            return cls.from_dict(json.load(fh), rational=rational)

    def to_dict(self):
        def enc(x):
            return str(x) if isinstance(x, Fraction) else x

        def lv(lvls):
            return [
                [{"scale": enc(m.scale), "offset": enc(m.offset), "prob": enc(m.prob)} for m in lvl]
                for lvl in lvls
            ]

        return {"preamble": lv(self.preamble), "period": lv(self.period)}


def _level_affine(level):
    """Coefficients of ``(E, M2) -> (E', M2')`` for one level.

    ``E' = a*E + b`` and ``M2' = g*M2 + d*E + z``.
    """
    a = sum(m.prob * m.scale for m in level)
    b = sum(m.prob * m.offset for m in level)
    g = sum(m.prob * m.scale * m.scale for m in level)
    d = sum(2 * m.prob * m.scale * m.offset for m in level)
    z = sum(m.prob * m.offset * m.offset for m in level)
    return a, b, g, d, z


def _apply(coef, e, m2):
    a, b, g, d, z = coef
    return a * e + b, g * m2 + d * e + z


def _compose(outer, inner):
    """Coefficients of ``outer o inner``."""
    a1, b1, g1, d1, z1 = outer
    a2, b2, g2, d2, z2 = inner
    return (a1 * a2, a1 * b2 + b1, g1 * g2, g1 * d2 + d1 * a2, g1 * z2 + d1 * b2 + z1)


@dataclass(frozen=True)
class TailMoments:
    """Moments of the tail measures ``X_k`` (the law below depth ``k``).

    Lists are indexed by depth ``k = 0 .. P + L - 1`` where ``P`` is the
    preamble length and ``L`` the period length; :meth:`at` extends to any
    depth by periodicity.
    """

    mean: tuple
    second_moment: tuple
    variance: tuple
    preamble_length: int
    period_length: int

    def _idx(self, k):
        P, L = self.preamble_length, self.period_length
        return k if k < P else P + (k - P) % L

    def at(self, k):
        """``(E_k, M2_k, V_k)``."""
        i = self._idx(k)
        return self.mean[i], self.second_moment[i], self.variance[i]


def _is_two_map(level):
    return len(level) == 2 and level[0].offset == 0 and level[1].offset + level[1].scale == 1


def tail_moments(spec):
    """Solve the level recursion for the tail means and second moments.

    One period acts on ``(E, M2)`` as an affine map with contraction
    factors below one, so its fixed point is unique; the remaining depths
    follow by applying single levels backwards.
    """
    P, L = len(spec.preamble), len(spec.period)
    if P == 0 and L == 1 and _is_two_map(spec.period[0]):
        # same closed form as the two-map model, so tables agree to the last bit
        (r1, _, p1), (r2, _, p2) = spec.period[0]
        e = _expectation(r1, r2, p1, p2)
        m2 = _second_moment(r1, r2, p1, p2)
        v = m2 - e * e
        return TailMoments((e,), (m2,), (v if v > 0 else v * 0,), 0, 1)
    coefs = [_level_affine(spec.level(k)) for k in range(1, P + L + 1)]
    total = coefs[P + L - 1]
    for k in range(P + L - 2, P - 1, -1):
        total = _compose(coefs[k], total)
    a, b, g, d, z = total
    if not (a < 1 and g < 1):
        raise SpecInvalid("period is not contracting")
    e_fix = b / (1 - a)
    m2_fix = (z + d * e_fix) / (1 - g)

    E = [None] * (P + L)
    M2 = [None] * (P + L)
    E[P], M2[P] = e_fix, m2_fix
    # depth P+L is depth P again; walk backwards through the period
    e, m2 = e_fix, m2_fix
    for k in range(P + L - 1, P, -1):
        e, m2 = _apply(coefs[k], e, m2)
        E[k], M2[k] = e, m2
    e, m2 = e_fix, m2_fix
    for k in range(P - 1, -1, -1):
        e, m2 = _apply(coefs[k], e, m2)
        E[k], M2[k] = e, m2
    V = []
    for e, m2 in zip(E, M2):
        v = m2 - e * e
        V.append(v if v > 0 else v * 0)
    return TailMoments(tuple(E), tuple(M2), tuple(V), P, L)


def recursion_residuals(spec, moments=None):
    """``max |Phi_{k+1}(E_{k+1}, M2_{k+1}) - (E_k, M2_k)|`` over one full cycle."""
    moments = moments or tail_moments(spec)
    worst = 0
    for k in range(len(spec.preamble) + len(spec.period)):
        e1, m1, _ = moments.at(k + 1)
        e0, m0, _ = moments.at(k)
        e, m2 = _apply(_level_affine(spec.level(k + 1)), e1, m1)
        worst = max(worst, abs(e - e0), abs(m2 - m0))
    return worst


def build_table_generalized(spec, m, level_cap=DEFAULT_LEVEL_CAP):
    """Mixed-radix :class:`~cantor_cvt.ifs_model.CylinderTable` at depth ``m``.

    ``level_cap`` bounds the table size at ``2**level_cap`` cylinders.
    """
    if m < 1:
        raise LevelTooLarge("depth must be at least 1")
    if spec.size(m) > 2**level_cap:
        raise LevelTooLarge(f"{spec.size(m)} cylinders at depth {m} exceed 2**{level_cap}")
    tm = tail_moments(spec)
    return _build(
        [spec.level(k) for k in range(1, m + 1)],
        lambda t: (tm.at(t)[0], tm.at(t)[2]),
        spec.exact,
        spec.symmetric,
    )


def find_cvts_generalized(spec, n, config=None):
    """Level escalation on mixed-radix tables; same contract as ``find_cvts``."""
    config = config or SearchConfig()
    m0 = 1
    while spec.size(m0) < n:
        m0 += 1
    if m0 > config.m_max:
        raise NTooLarge(f"n={n} needs depth >= {m0} but m_max={config.m_max}")
    return escalate(
        lambda m: build_table_generalized(spec, m, config.level_cap), n, config, m0
    )
