from fractions import Fraction as F

import numpy as np
import pytest
from _brute import naive_cvts
from _reference import (
    CANTOR_N3_M2,
    CANTOR_N3_M5,
    CANTOR_N4,
    R0P4375,
    R4_9_M4,
    R4_9_M5,
    cuts,
    sig6,
)

from cantor_cvt import (
    BlockPartition,
    EmptyList,
    LevelTooLarge,
    NoCvtFoundUpToMMax,
    NTooLarge,
    SearchConfig,
    SymmetryPruningInvalid,
    best_cvt,
    build_table,
    discretize,
    enumerate_cvts,
    find_cvts,
    gap_condition,
    lift_partition,
    lloyd,
    reflect_partition,
    validate_params,
)
from cantor_cvt.cvt_search import CvtResult, min_level


def boundaries(results):
    return [r.boundaries for r in results]


# --- gap condition -----------------------------------------------------------------


def test_gap_condition_examples(cantor):
    t = build_table(cantor, 2)
    assert gap_condition(t, F(1, 18), F(5, 18), 1, 0)
    assert not gap_condition(t, F(1, 18), F(5, 6), 1, 0)


def test_gap_condition_closed_endpoints(cantor):
    t = build_table(cantor, 2)
    # midpoint exactly at right end of cylinder 2 (1/3) and at left end of cylinder 3 (2/3)
    assert gap_condition(t, F(1, 3), F(1, 3), 2, 0)
    assert gap_condition(t, F(2, 3), F(2, 3), 2, 0)
    assert not gap_condition(t, F(2, 3), F(2, 3) + F(1, 10**9), 2, 0)


def test_gap_condition_tolerance(cantor_float):
    t = build_table(cantor_float, 2)
    x = 2 / 3 + 5e-13
    assert gap_condition(t, x, x, 2, 1e-12)
    assert not gap_condition(t, x, x, 2, 0)


# --- enumeration against fixtures -----------------------------------------------------


def test_cantor_n3_m2_exact(cantor):
    res = enumerate_cvts(build_table(cantor, 2), 3)
    assert len(res) == 2
    for r, (blocks, cents) in zip(res, CANTOR_N3_M2):
        assert r.blocks == blocks
        assert r.centroids == cents
    assert res[0].distortion == res[1].distortion == F(5, 648)


def test_cantor_n3_m2_float(cantor_float):
    res = enumerate_cvts(build_table(cantor_float, 2), 3)
    for r, (blocks, cents) in zip(res, CANTOR_N3_M2):
        assert r.blocks == blocks
        np.testing.assert_allclose(r.centroids, [float(c) for c in cents], atol=1e-12, rtol=0)


def test_cantor_n3_m5(cantor_float):
    res = enumerate_cvts(build_table(cantor_float, 5), 3)
    assert [r.blocks for r in res] == CANTOR_N3_M5


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_cantor_n4(cantor, m):
    res = enumerate_cvts(build_table(cantor, m), 4)
    assert [r.blocks for r in res] == CANTOR_N4[m]


def test_four_ninths(r4_9):
    assert enumerate_cvts(build_table(r4_9, 2), 3) == []
    assert enumerate_cvts(build_table(r4_9, 3), 3) == []
    for m, ref in [(4, R4_9_M4), (5, R4_9_M5)]:
        res = enumerate_cvts(build_table(r4_9, m), 3)
        assert [r.blocks for r in res] == [b for b, _ in ref]
        assert [tuple(sig6(c) for c in r.centroids) for r in res] == [c for _, c in ref]


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_r0p4375(r0p4375, m):
    res = enumerate_cvts(build_table(r0p4375, m), 3)
    ref = R0P4375[m]
    assert [r.blocks for r in res] == [b for b, _, _ in ref]
    assert [tuple(sig6(c) for c in r.centroids) for r in res] == [c for _, c, _ in ref]
    assert [sig6(r.distortion) for r in res] == [d for _, _, d in ref]


def test_boundary_points_are_midpoints(r0p4375):
    for r in enumerate_cvts(build_table(r0p4375, 5), 3):
        c = r.centroids
        assert r.boundary_points == ((c[0] + c[1]) / 2, (c[1] + c[2]) / 2)


def test_single_generator(asym):
    res = enumerate_cvts(build_table(asym, 3), 1)
    assert len(res) == 1
    assert res[0].centroids == (asym.mean,)
    assert res[0].distortion == asym.variance


def test_singletons_when_n_equals_size(cantor):
    res = enumerate_cvts(build_table(cantor, 2), 4)
    assert [r.boundaries for r in res] == [(1, 2, 3)]


def test_enumerate_errors(cantor_float, asym_float):
    t = build_table(cantor_float, 2)
    with pytest.raises(NTooLarge):
        enumerate_cvts(t, 5)
    with pytest.raises(NTooLarge):
        enumerate_cvts(t, 0)
    with pytest.raises(SymmetryPruningInvalid):
        enumerate_cvts(build_table(asym_float, 3), 3, SearchConfig(symmetry_pruning=True))


# --- completeness, nesting, symmetry -------------------------------------------------------

GRID_R = [0.3, 1 / 3, 0.4375, 4 / 9, 0.47]


@pytest.mark.parametrize("r", GRID_R)
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("m", range(1, 8))
def test_matches_naive_enumeration(r, n, m):
    t = build_table(validate_params(r, r, 0.5), m)
    if n > t.size:
        pytest.skip("n exceeds cylinder count")
    assert boundaries(enumerate_cvts(t, n)) == naive_cvts(t, n)


@pytest.mark.parametrize("m", range(1, 8))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_matches_naive_asymmetric(asym_float, m, n):
    t = build_table(asym_float, m)
    if n > t.size:
        pytest.skip("n exceeds cylinder count")
    assert boundaries(enumerate_cvts(t, n)) == naive_cvts(t, n)


def test_exact_mode_matches_float_on_fixture(cantor, cantor_float):
    for m in range(2, 7):
        a = enumerate_cvts(build_table(cantor, m), 3)
        b = enumerate_cvts(build_table(cantor_float, m), 3)
        assert boundaries(a) == boundaries(b)


@pytest.mark.parametrize("r", GRID_R)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_nesting(r, n):
    model = validate_params(r, r, 0.5)
    for m in range(min_level(n), 8):
        deeper = set(boundaries(enumerate_cvts(build_table(model, m + 1), n)))
        for res in enumerate_cvts(build_table(model, m), n):
            assert lift_partition(res.partition, 1).boundaries in deeper


@pytest.mark.parametrize("r", GRID_R)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_symmetry_pruning_is_lossless(r, n):
    t = build_table(validate_params(r, r, 0.5), 7)
    plain = enumerate_cvts(t, n)
    pruned = enumerate_cvts(t, n, SearchConfig(symmetry_pruning=True))
    assert boundaries(plain) == boundaries(pruned)
    got = set(boundaries(plain))
    assert {reflect_partition(p.partition).boundaries for p in plain} == got


def test_symmetry_pruning_exact(cantor):
    t = build_table(cantor, 5)
    for n in (2, 3, 4):
        a = enumerate_cvts(t, n)
        b = enumerate_cvts(t, n, SearchConfig(symmetry_pruning=True))
        assert [(r.boundaries, r.centroids, r.distortion) for r in a] == [
            (r.boundaries, r.centroids, r.distortion) for r in b
        ]


def test_parallel_matches_serial(r0p4375):
    t = build_table(r0p4375, 9)
    serial = enumerate_cvts(t, 3)
    par = enumerate_cvts(t, 3, SearchConfig(parallel=True, workers=2))
    assert boundaries(serial) == boundaries(par)
    assert [r.distortion for r in serial] == [r.distortion for r in par]


@pytest.mark.parametrize("r", [1 / 3, 0.4375, 4 / 9])
def test_cvts_are_lloyd_fixed_points(r):
    model = validate_params(r, r, 0.5)
    for m in range(2, 8):
        atoms = discretize(model, m)
        for res in enumerate_cvts(build_table(model, m), 3):
            out = lloyd(atoms, res.centroids, max_iter=1)
            np.testing.assert_allclose(out.centroids, res.centroids, atol=1e-12, rtol=0)
            assert out.cost == pytest.approx(res.distortion, abs=1e-14)


def test_block_centroids_monotone_exhaustive():
    # the binary-search cut ranges rely on this
    for r in (0.3, 0.4375, 0.49):
        for m in range(1, 11):
            t = build_table(validate_params(r, r, 0.5), m)
            A = np.asarray(t.A, dtype=float)
            B = np.asarray(t.B, dtype=float)
            N = t.size
            for i in range(N):
                c = (B[i + 1 :] - B[i]) / (A[i + 1 :] - A[i])
                assert np.all(np.diff(c) >= -1e-15)
            for j in range(1, N + 1):
                c = (B[j] - B[:j]) / (A[j] - A[:j])
                assert np.all(np.diff(c) >= -1e-15)


# --- escalation and selection ------------------------------------------------------------


def test_find_cvts_levels(cantor, r4_9, asym):
    assert find_cvts(r4_9, 3)[0] == 4
    m, res = find_cvts(cantor, 3)
    assert m == 2 and len(res) == 2
    m, res = find_cvts(asym, 3)
    assert m == 2 and len(res) == 1
    assert find_cvts(cantor, 4)[0] == 2
    assert find_cvts(cantor, 5)[0] == 3


def test_find_cvts_respects_m_start(r4_9):
    m, res = find_cvts(r4_9, 3, SearchConfig(m_start=5))
    assert m == 5 and len(res) == 4


def test_find_cvts_gives_up(r4_9):
    with pytest.raises(NoCvtFoundUpToMMax) as info:
        find_cvts(r4_9, 3, SearchConfig(m_max=3))
    assert info.value.n == 3
    with pytest.raises(NTooLarge):
        find_cvts(r4_9, 9, SearchConfig(m_max=3))


def test_search_config_validation():
    with pytest.raises(LevelTooLarge):
        SearchConfig(m_start=5, m_max=4)
    with pytest.raises(LevelTooLarge):
        SearchConfig(m_max=30)
    with pytest.raises(ValueError):
        SearchConfig(tolerance=-1)


def test_best_cvt(r0p4375):
    res = enumerate_cvts(build_table(r0p4375, 5), 3)
    best = best_cvt(res)
    # two mirror-image CVTs tie; the smaller cut vector wins
    assert best.blocks == [(1, 11), (12, 20), (21, 32)]
    assert sig6(best.distortion) == "0.0110059"


def test_best_cvt_tie_order_is_independent_of_input_order(cantor):
    res = enumerate_cvts(build_table(cantor, 2), 3)
    assert best_cvt(res) == best_cvt(res[::-1]) == res[0]


def test_best_cvt_near_tie_tolerance():
    p = BlockPartition(4, (1, 2))
    q = BlockPartition(4, (2, 3))
    a = CvtResult(q, (0, 0, 0), 0.1, ())
    b = CvtResult(p, (0, 0, 0), 0.1 + 1e-13, ())
    assert best_cvt([a, b]) is b
    assert best_cvt([a, b], tolerance=0) is a


def test_best_cvt_empty():
    with pytest.raises(EmptyList):
        best_cvt([])


def test_lift_and_reflect():
    p = BlockPartition.from_blocks([(1, 1), (2, 2), (3, 4)], level=2)
    assert lift_partition(p, 1).blocks == [(1, 2), (3, 4), (5, 8)]
    assert lift_partition(p, 3).blocks == [(1, 8), (9, 16), (17, 32)]
    assert reflect_partition(p).blocks == [(1, 2), (3, 3), (4, 4)]
    with pytest.raises(LevelTooLarge):
        lift_partition(p, 30)


def test_partition_from_cuts_roundtrip():
    p = BlockPartition(32, (15, 17))
    assert p.blocks == [(1, 15), (16, 17), (18, 32)]
    assert BlockPartition.from_blocks(p.blocks) == p
    assert str(BlockPartition(4, (1, 2))) == "{[1, 1], [2, 2], [3, 4]}"
    assert cuts(p.blocks) == p.boundaries
