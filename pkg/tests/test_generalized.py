import json
from fractions import Fraction as F

import numpy as np
import pytest
from _reference import CANTOR_N3_M2, CANTOR_N4, R0P4375, R4_9_M4, sig6

from cantor_cvt import (
    AffineMap,
    GeneralizedIfsSpec,
    SearchConfig,
    SpecInvalid,
    build_table,
    build_table_generalized,
    discretize,
    enumerate_cvts,
    find_cvts_generalized,
    lloyd,
    moments_by_truncation,
    tail_moments,
    validate_params,
)
from cantor_cvt.generalized import recursion_residuals

THIRDS = ((F(1, 3), F(0), F(1, 2)), (F(1, 3), F(2, 3), F(1, 2)))
QUARTERS = ((F(1, 4), F(0), F(1, 2)), (F(1, 4), F(3, 4), F(1, 2)))
TRIPLE = ((F(1, 5), F(0), F(1, 4)), (F(1, 5), F(2, 5), F(1, 2)), (F(1, 5), F(4, 5), F(1, 4)))


@pytest.fixture
def alternating():
    return GeneralizedIfsSpec(preamble=(), period=(THIRDS, QUARTERS))


@pytest.fixture
def mixed():
    """Three maps at level 1, then the middle-thirds pair forever."""
    return GeneralizedIfsSpec(preamble=(TRIPLE,), period=(THIRDS,))


def test_constant_spec_reproduces_tables(cantor, asym, r0p4375):
    for model in (cantor, asym, r0p4375):
        spec = GeneralizedIfsSpec.constant(model)
        for m in (1, 3, 5):
            a, b = build_table(model, m), build_table_generalized(spec, m)
            for name in ("left", "right", "A", "B", "C"):
                assert list(getattr(a, name)) == list(getattr(b, name))


def test_constant_spec_reproduces_fixtures(cantor, r4_9, r0p4375):
    spec = GeneralizedIfsSpec.constant(cantor)
    res = enumerate_cvts(build_table_generalized(spec, 2), 3)
    assert [(r.blocks, r.centroids) for r in res] == CANTOR_N3_M2
    for m in (2, 3, 4, 5):
        assert [r.blocks for r in enumerate_cvts(build_table_generalized(spec, m), 4)] == CANTOR_N4[m]
    m, res = find_cvts_generalized(GeneralizedIfsSpec.constant(r4_9), 3)
    assert m == 4 and [r.blocks for r in res] == [b for b, _ in R4_9_M4]
    spec = GeneralizedIfsSpec.constant(r0p4375)
    res = enumerate_cvts(build_table_generalized(spec, 5), 3)
    assert [sig6(r.distortion) for r in res] == [d for _, _, d in R0P4375[5]]


def test_tail_moments_constant(asym):
    tm = tail_moments(GeneralizedIfsSpec.constant(asym))
    assert tm.at(0) == (F(2, 3), F(28, 51), F(16, 153))
    assert tm.at(7) == tm.at(0)


def test_alternating_moments(alternating):
    tm = tail_moments(alternating)
    assert tm.mean == (F(1, 2), F(1, 2))
    e, m2, v = moments_by_truncation(alternating, 24)
    assert e == pytest.approx(0.5, abs=1e-12)
    assert v == pytest.approx(float(tm.variance[0]), abs=1e-9)
    # V0 = V1/9 + 1/9 and V1 = V0/16 + 9/64
    assert tm.variance[0] == F(73, 572)
    assert tm.at(2) == tm.at(0) and tm.at(3) == tm.at(1)


def test_mixed_moments_by_truncation(mixed):
    tm = tail_moments(mixed)
    e, _, v = moments_by_truncation(mixed, 16)
    assert e == pytest.approx(float(tm.mean[0]), abs=1e-7)
    assert v == pytest.approx(float(tm.variance[0]), abs=1e-7)


def test_recursion_residuals(alternating, mixed):
    assert recursion_residuals(alternating) == 0
    floaty = GeneralizedIfsSpec(
        preamble=(((0.2, 0.0, 0.3), (0.3, 0.7, 0.7)),),
        period=(((0.3, 0.0, 0.4), (0.25, 0.75, 0.6)), ((0.45, 0.0, 0.5), (0.45, 0.55, 0.5))),
    )
    assert recursion_residuals(floaty) < 1e-12
    assert recursion_residuals(mixed) == 0


def test_mixed_radix_table(mixed):
    t = build_table_generalized(mixed, 2)
    assert t.size == 6
    weights = [t.mass(i, i) for i in range(1, 7)]
    assert weights == [F(1, 8), F(1, 8), F(1, 4), F(1, 4), F(1, 8), F(1, 8)]
    assert t.A[-1] == 1
    assert all(t.right[i] <= t.left[i + 1] for i in range(5))


def test_mixed_cylinder_centroid_uses_tail_mean(alternating):
    # level-1 cylinder centroids are S_j(E_1), E_1 the mean of the quarter-first tail
    t = build_table_generalized(alternating, 1)
    e1 = tail_moments(alternating).mean[1]
    assert t.centroid(1, 1) == F(1, 3) * e1
    assert t.centroid(2, 2) == F(1, 3) * e1 + F(2, 3)


def test_symmetric_generalized_n2(alternating):
    t = build_table_generalized(alternating, 4)
    for r in enumerate_cvts(t, 2):
        assert r.centroids[0] + r.centroids[1] == 1
    pruned = enumerate_cvts(t, 3, SearchConfig(symmetry_pruning=True))
    assert [r.boundaries for r in pruned] == [r.boundaries for r in enumerate_cvts(t, 3)]


def test_generalized_cvts_are_lloyd_fixed_points(alternating, mixed):
    for spec in (alternating, mixed):
        for m in (2, 3, 4):
            atoms = discretize(spec, m)
            for res in enumerate_cvts(build_table_generalized(spec, m), 3):
                c = [float(x) for x in res.centroids]
                out = lloyd(atoms, c, max_iter=1)
                np.testing.assert_allclose(out.centroids, c, atol=1e-12, rtol=0)
                assert out.cost == pytest.approx(float(res.distortion), abs=1e-14)


def test_find_cvts_generalized_reports_level(mixed):
    m, res = find_cvts_generalized(mixed, 3)
    assert m >= 1 and res


@pytest.mark.parametrize(
    "period",
    [
        ((F(1, 3), 0, F(1, 2)),),  # one map
        ((F(1, 3), 0, F(1, 3)), (F(1, 3), F(2, 3), F(1, 2))),  # probs
        ((F(2, 3), 0, F(1, 2)), (F(1, 2), F(1, 2), F(1, 2))),  # sum of scales
        ((F(1, 3), F(2, 3), F(1, 2)), (F(1, 3), 0, F(1, 2))),  # out of order
        ((F(1, 3), 0, F(1, 2)), (F(1, 3), F(5, 6), F(1, 2))),  # leaves [0, 1]
    ],
)
def test_spec_invalid(period):
    with pytest.raises(SpecInvalid):
        GeneralizedIfsSpec(preamble=(), period=(period,))


def test_spec_empty_period():
    with pytest.raises(SpecInvalid):
        GeneralizedIfsSpec(preamble=(THIRDS,), period=())


def test_from_dict_and_load(tmp_path, alternating):
    doc = alternating.to_dict()
    assert doc["period"][0][1] == {"scale": "1/3", "offset": "2/3", "prob": "1/2"}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    back = GeneralizedIfsSpec.load(path)
    assert back == alternating and back.exact
    assert not GeneralizedIfsSpec.from_dict(doc, rational=False).exact
    with pytest.raises(SpecInvalid):
        GeneralizedIfsSpec.from_dict({"preamble": []})
    with pytest.raises(SpecInvalid):
        GeneralizedIfsSpec.from_dict({"period": [[{"scale": "x", "offset": 0, "prob": 1}]]})


def test_level_indexing(mixed):
    assert mixed.level(1) == tuple(AffineMap(*m) for m in TRIPLE)
    assert mixed.level(2) == mixed.level(9)
    assert mixed.radices(3) == [3, 2, 2]
    with pytest.raises(ValueError):
        mixed.level(0)


def test_constant_model_symmetric_flag():
    assert GeneralizedIfsSpec.constant(validate_params(F(1, 3), F(1, 3), F(1, 2))).symmetric
    assert not GeneralizedIfsSpec.constant(validate_params(F(1, 4), F(1, 2), F(1, 4))).symmetric


def test_period_recursion_matches_closed_form(asym):
    # two copies of the same level take the general fixed-point route
    level = GeneralizedIfsSpec.constant(asym).period[0]
    tm = tail_moments(GeneralizedIfsSpec(preamble=(level,), period=(level, level)))
    assert set(tm.mean) == {asym.mean}
    assert set(tm.variance) == {asym.variance}
