import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gybe_forge.blocks import BlockSpec, OddBlockParams, TrigBlockParams, XxzBlockParams, build_trig_block, build_xxz_block
from gybe_forge.errors import DimensionError, IncompleteBlockMapError, InvalidPatternError, UnsupportedDimensionError
from gybe_forge.verify import GybeShape, verify_constant, verify_inhomogeneous, verify_induced, verify_spectral
from gybe_forge.xshape import (
    BlockMap,
    LabelMap,
    mixed_block_map,
    assemble_x_shaped,
    build_appendix_8x8,
    build_induced,
    build_m_family,
    build_p_block_general,
    cell_states,
    extract_block,
    is_x_shaped,
    m_matrix,
    p_block_index,
    rate_pattern_ok,
    vertex_count,
)
from oracles import difference_residual, x_shape_by_labels

TRIG = BlockSpec("trig", TrigBlockParams(0.6, 0.9, 1.3, 1, -1, -1))


def test_label_map_orders_labels_high_to_low():
    assert LabelMap(4).labels == [2, 1, -1, -2]
    assert LabelMap(5).labels == [2, 1, 0, -1, -2]
    for n in range(1, 8):
        lm = LabelMap(n)
        assert [lm.index(a) for a in lm.labels] == list(range(n))
    with pytest.raises(DimensionError):
        LabelMap(4).index(0)
    with pytest.raises(DimensionError):
        LabelMap(4).index(3)


@pytest.mark.parametrize("n1,n2,count", [(2, 2, 8), (2, 4, 16), (3, 3, 17), (4, 4, 32), (3, 4, 24)])
def test_vertex_count(n1, n2, count):
    assert vertex_count(n1, n2) == count


def _random_block_map(n1, n2, seed):
    rng = np.random.default_rng(seed)
    bm = BlockMap(n1, n2)
    for pair in bm.required_pairs():
        size = (1 if pair[0] == 0 else 2) * (1 if pair[1] == 0 else 2)
        x_mask = np.eye(size) + np.fliplr(np.eye(size))
        m = (rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))) * (x_mask > 0)
        bm.cells[pair] = (lambda m: (lambda x: m * (1 + x)))(m)
        bm.gamma[pair] = rng.normal()
    return bm


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_assembled_matrices_are_x_shaped_and_round_trip(n1, n2, seed):
    bm = _random_block_map(n1, n2, seed)
    u = 0.3
    m = assemble_x_shaped(bm, u)
    assert is_x_shaped(m)
    assert np.count_nonzero(m) <= vertex_count(n1, n2)
    lm1, lm2 = bm.label_maps
    for pair in bm.required_pairs():
        blk = extract_block(m, lm1, lm2, pair, bm.gamma[pair], u)
        assert np.allclose(blk, bm.cells[pair](u), rtol=1e-14, atol=0)


@pytest.mark.parametrize("n1,n2", [(2, 4), (3, 5), (4, 3)])
def test_assembly_matches_label_loop_oracle(n1, n2):
    bm = _random_block_map(n1, n2, 11)
    u = 0.0
    assert np.array_equal(assemble_x_shaped(bm, u), x_shape_by_labels(n1, n2, lambda n, m: bm.cells[(n, m)](u)))


def test_missing_cell_and_bad_size_are_reported():
    with pytest.raises(IncompleteBlockMapError):
        assemble_x_shaped(BlockMap.uniform(3, 3, TRIG), 0.1)
    bm = BlockMap(2, 2, {(1, 1): lambda x: np.eye(3)})
    with pytest.raises(DimensionError):
        assemble_x_shaped(bm, 0.1)
    with pytest.raises(DimensionError):
        extract_block(np.eye(5), LabelMap(2), LabelMap(2), (1, 1))


def test_cell_states_cover_the_space_once():
    lm1, lm2 = LabelMap(5), LabelMap(4)
    seen = sorted(i for n in lm1.magnitudes for m in lm2.magnitudes for i in cell_states(lm1, lm2, (n, m)))
    assert seen == list(range(20))


@pytest.mark.parametrize("dim", [4, 8, 16, 6])
def test_m_matrix_squares_to_minus_identity(dim):
    fam = build_m_family(dim, 0.3)
    assert np.max(np.abs(fam.m @ fam.m + np.eye(dim))) < 1e-15
    assert np.array_equal(fam.m_plus, np.eye(dim) + fam.m)
    assert is_x_shaped(fam.m)


def test_m_matrix_rejects_odd_dimension():
    with pytest.raises(UnsupportedDimensionError):
        m_matrix(5)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_m_family_solves_gybe_shifted_by_one(k):
    f = lambda u: build_m_family(2**k, u).r
    for u, v in [(0.3, -0.7), (0.9, 0.2)]:
        assert verify_spectral(f, GybeShape.dkp(2, k, 1), u, v).max_abs_residual < 1e-12


def test_m_family_two_site_case_matches_oracle():
    f = lambda u: build_m_family(4, u).r
    assert difference_residual(f, f, (2, 2, 2), 0, 1, 0.4, -0.3) < 1e-13


@pytest.mark.parametrize("k,p", [(2, 1), (3, 1), (3, 2), (4, 1), (4, 3)])
def test_m_plus_and_minus_satisfy_constant_braid_relation(k, p):
    fam = build_m_family(2**k)
    shape = GybeShape.dkp(2, k, p)
    assert verify_constant(fam.m_plus, shape).max_abs_residual < 1e-12
    assert verify_constant(fam.m_minus, shape).max_abs_residual < 1e-12


def test_bare_m_is_not_a_braid_operator():
    # the relation only holds once the identity is added: ABA and BAB differ by more than a sign
    fam = build_m_family(4)
    rep = verify_constant(fam.m, GybeShape.dkp(2, 2, 1))
    assert rep.max_abs_residual > 0.5


def _uniform_pairs(n1, n2, cell, gamma=None):
    gamma = gamma or {}
    def make(a, b, g):
        bm = BlockMap.uniform(a, b, cell)
        bm.gamma.update(g)
        return lambda u: assemble_x_shaped(bm, u)
    flip = {(m, n): r for (n, m), r in gamma.items()}
    return {
        (n1, n2): make(n1, n2, gamma),
        (n2, n1): make(n2, n1, flip),
        (n1, n1): make(n1, n1, {}),
        (n2, n2): make(n2, n2, {}),
    }


def test_identical_cells_give_inhomogeneous_solution():
    pairs = _uniform_pairs(2, 4, TRIG)
    for u, v in [(0.31, -0.47), (0.8, 0.1)]:
        rep = verify_inhomogeneous(pairs, (2, 4, 2), u, v, full_set=True)
        assert rep.max_abs_residual < 1e-10
        assert set(rep.details["equations"]) == {"123", "231", "312"}


def test_identical_cells_with_per_cell_prefactors():
    pairs = _uniform_pairs(4, 8, TRIG, gamma={(1, 1): 0.3, (1, 2): -0.2, (2, 3): 0.5})
    rep = verify_inhomogeneous(pairs, (4, 8, 4), 0.2, -0.5, full_set=True)
    assert rep.max_abs_residual < 1e-10


def test_homogeneous_assembly_matches_oracle():
    f = _uniform_pairs(4, 4, TRIG)[(4, 4)]
    assert verify_spectral(f, GybeShape.dkp(4, 2, 1), 0.3, -0.2).max_abs_residual < 1e-10


@pytest.mark.parametrize("q", [1.0, 2.5, -0.7, 0.5 + 1.2j])
def test_odd_dimension_with_central_sector(q):
    rate = 0.8
    cell = BlockSpec("trig", TrigBlockParams(rate, rate, q, 1, 1, 1))
    odd = BlockSpec("odd", OddBlockParams(0.5, np.sqrt(-complex(q)), 0.37))
    bm = BlockMap.uniform(3, 3, cell, odd)
    f = lambda u: assemble_x_shaped(bm, u)
    assert np.array_equal(f(0.0), np.eye(9))
    assert verify_spectral(f, GybeShape.dkp(3, 2, 1), 0.4, -0.25).max_abs_residual < 1e-10


def test_central_sector_with_unrelated_p_fails():
    cell = BlockSpec("trig", TrigBlockParams(0.8, 0.8, 2.0, 1, 1, 1))
    odd = BlockSpec("odd", OddBlockParams(0.5, 1.0, 0.37))
    bm = BlockMap.uniform(3, 3, cell, odd)
    rep = verify_spectral(lambda u: assemble_x_shaped(bm, u), GybeShape.dkp(3, 2, 1), 0.4, -0.25)
    assert rep.max_abs_residual > 1e-4


@pytest.mark.parametrize("n1,n2", [(1, 1), (2, 2), (1, 3)])
def test_induced_matrix_keeps_the_braid_relation(n1, n2):
    r22 = lambda u: build_trig_block(TrigBlockParams(0.6, 0.9, 1.3, 1, -1, -1), u)
    n = n1 * n2
    phases = np.linspace(-1, 1, n)
    ind = lambda u: build_induced(r22(u), n1, n2, phases, u)
    assert verify_induced(ind, r22, n, 0.35, -0.6).max_abs_residual < 1e-12
    plain = lambda u: build_induced(r22(u), n1, n2)
    assert verify_induced(plain, r22, n, 0.35, -0.6).max_abs_residual < 1e-12


def test_induced_rejects_bad_phases():
    with pytest.raises(DimensionError):
        build_induced(np.eye(4), 2, 2, phases=[0.1, 0.2])
    with pytest.raises(DimensionError):
        build_induced(np.eye(3), 1, 1)


VALID_PATTERNS = [
    (0.7, -0.4, 0.7, -0.4),
    (0.7, -0.4, -0.4, 0.7),
    (-0.4, 0.7, 0.7, -0.4),
    (-0.4, 0.7, -0.4, 0.7),
]


@pytest.mark.parametrize("alphas", VALID_PATTERNS)
@pytest.mark.parametrize("t", [1.0, -1.0])
def test_mixed_trig_patterns_solve_mixed_equations(alphas, t):
    params = {"alphas": alphas, "alpha": 0.35, "q": 1.7, "t": t}
    pairs = {
        (2, 4): lambda u: build_appendix_8x8("trig24", params, u),
        (4, 2): lambda u: build_appendix_8x8("trig42", params, u),
    }
    for dims in [(2, 4, 2), (4, 2, 4)]:
        assert verify_inhomogeneous(pairs, dims, 0.41, -0.23).max_abs_residual < 1e-11


def test_mixed_trig_rejects_invalid_pattern():
    assert not rate_pattern_ok((1.0, 0.5, 0.3, 0.2))
    with pytest.raises(InvalidPatternError):
        mixed_block_map("trig24", {"alphas": (1.0, 0.5, 0.3, 0.2)})
    params = {"alphas": (1.0, 0.5, 0.3, 0.2), "alpha": 0.2}
    pairs = {
        (2, 4): lambda u: build_appendix_8x8("trig24", params, u, allow_invalid=True),
        (4, 2): lambda u: build_appendix_8x8("trig42", params, u, allow_invalid=True),
    }
    # the (2,4,2) ordering decouples cell by cell; the (4,2,4) one ties the rates together
    assert verify_inhomogeneous(pairs, (4, 2, 4), 0.41, -0.23).max_abs_residual > 1e-4


@pytest.mark.parametrize("variant", ["plus", "minus"])
def test_mixed_xxz_matrices(variant):
    params = {"variant": variant, "u0": 0.8, "ux": 0.8, "gamma": 0.3, "beta": -0.2, "alpha": 0.4}
    seed = XxzBlockParams(0.8, 0.3, variant)
    pairs = {
        (2, 4): lambda u: build_appendix_8x8("xxz24", params, u),
        (4, 2): lambda u: build_appendix_8x8("xxz42", params, u),
        (2, 2): lambda u: build_xxz_block(seed, u),
    }
    for u, v in [(0.41, -0.23), (-0.7, 0.15)]:
        assert verify_inhomogeneous(pairs, (2, 2, 4), u, v).max_abs_residual < 1e-10
        assert verify_inhomogeneous(pairs, (2, 4, 2), u, v, full_set=True).max_abs_residual < 1e-10
        assert verify_inhomogeneous(pairs, (4, 2, 4), u, v).max_abs_residual < 1e-10


def test_mixed_kind_xxz_passes_first_equation_only():
    # negative control: mismatched cell kinds satisfy the first ordering but not the rotated ones
    params = {"variant": "plus", "variant_outer": "minus", "u0": 0.8, "gamma": 0.3, "beta": -0.2, "alpha": 0.4}
    seed = XxzBlockParams(0.8, 0.3, "plus")
    pairs = {
        (2, 4): lambda u: build_appendix_8x8("xxz24", params, u),
        (4, 2): lambda u: build_appendix_8x8("xxz42", params, u),
        (2, 2): lambda u: build_xxz_block(seed, u),
    }
    rep = verify_inhomogeneous(pairs, (2, 4, 2), 0.41, -0.23, full_set=True)
    eqs = rep.details["equations"]
    assert eqs["123"]["pass"]
    assert not (eqs["231"]["pass"] and eqs["312"]["pass"])


def test_p_block_index_is_color_major():
    assert [p_block_index(2, 3, lab, c) for c in range(2) for lab in (3, 2, 1)] == list(range(6))


def test_p_block_with_p_two_is_a_relabeled_x_shape():
    cells = {(n, k): TRIG.build for n in (1, 2) for k in (1, 2)}
    u = 0.37
    pb = build_p_block_general(2, 2, 2, cells, u)
    xs = assemble_x_shaped(BlockMap.uniform(4, 4, TRIG), u)
    # the p-block layout lists color-1 labels in descending order, the X layout ascending
    relabel = [0, 1, 3, 2]
    perm = [relabel[a] * 4 + relabel[b] for a in range(4) for b in range(4)]
    assert np.allclose(pb, xs[np.ix_(perm, perm)], atol=0, rtol=0)


def test_p_block_general_solves_ybe_with_identical_cells():
    cell = lambda u: build_trig_block(TrigBlockParams(0.6, 0.9, 1.3, 1, -1, -1), u)
    cells = {(n, k): cell for n in (1, 2) for k in (1, 2)}
    f = lambda u: build_p_block_general(2, 2, 2, cells, u)
    assert verify_spectral(f, GybeShape.dkp(4, 2, 1), 0.3, -0.6).max_abs_residual < 1e-10


def test_p_block_general_validation():
    with pytest.raises(IncompleteBlockMapError):
        build_p_block_general(2, 2, 2, {(1, 1): np.eye(4)})
    with pytest.raises(DimensionError):
        build_p_block_general(2, 1, 1, {(1, 1): np.eye(3)})
    m = build_p_block_general(3, 1, 1, {(1, 1): np.diag(np.arange(1, 10))})
    assert np.array_equal(m, np.diag(np.arange(1, 10)))
