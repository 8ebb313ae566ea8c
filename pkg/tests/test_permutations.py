import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gybe_forge.errors import GybeError, UnknownTargetError
from gybe_forge.permutations import (
    COLORS_N2,
    COLORS_N4,
    M_BAR,
    M_BAR_ENTRIES,
    M_BREVE,
    M_BREVE_ENTRIES,
    N2_PARITY,
    TABLE_PARITY,
    YBE_RATE_PATTERNS,
    ParityAssignment,
    PermSpec,
    build_graded_perm,
    build_r16,
    build_r16_unitary,
    build_r22_two_parameter,
    build_r44,
    build_r2222,
    family_residual,
    h44_density,
    n2_braid_relations,
    parity_search,
    pauli_identities_check,
    r44_generator,
    symmetric_parity,
    yang_baxterize,
)
from gybe_forge.verify import GybeShape, draw_pairs, verify_spectral, verify_unitary
from oracles import difference_residual, r16_from_table

YBE4 = GybeShape.dkp(4, 2, 1)


def test_perm_spec_validation():
    assert all(p.involutive for p in COLORS_N4.values())
    assert not PermSpec(3, (1, 2, 0)).involutive
    with pytest.raises(GybeError):
        PermSpec(3, (0, 0, 1))


def test_ungraded_trivial_color_is_the_swap():
    P = build_graded_perm(PermSpec.trivial(3), ParityAssignment(3))
    swap = np.zeros((9, 9))
    for a, b in itertools.product(range(3), repeat=2):
        swap[b * 3 + a, a * 3 + b] = 1
    assert np.array_equal(P, swap)


def test_graded_perm_is_unitary():
    for spec in COLORS_N4.values():
        P = build_graded_perm(spec, TABLE_PARITY)
        assert np.allclose(P @ P.conj().T, np.eye(16))


def test_yang_baxterize_endpoints():
    P = build_graded_perm(COLORS_N4["a"], TABLE_PARITY)
    assert np.allclose(yang_baxterize(P, 0.7, 0.0), 0.5 * (P + P.conj().T))


def test_n2_operators_match_closed_forms():
    g = build_graded_perm(COLORS_N2["0"], N2_PARITY)
    t = build_graded_perm(COLORS_N2["tau"], N2_PARITY)
    assert np.array_equal(g, np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]]))
    assert np.array_equal(t, np.array([[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, 0, 0, 0]]))


def test_n2_braid_relations_hold_exactly():
    rel = n2_braid_relations()
    assert len(rel) == 5
    assert all(v == 0.0 for v in rel.values())


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1, 1), st.floats(-1, 1))
def test_two_parameter_n2_family(a, b, u, v):
    f = lambda x: build_r22_two_parameter(a * x, b * x)
    assert verify_spectral(f, GybeShape.dkp(2, 2, 1), u, v).max_abs_residual < 1e-10


@pytest.mark.parametrize("alphas", [(1, 1, 1, 1), (1, 0.5, 0.3, 0.2), (0, 1, 1, 0), (2, -1, 0.5, 3)])
def test_r16_equals_entry_table(alphas):
    for u in (0.0, 0.37, -1.1):
        assert np.allclose(build_r16(alphas, u), r16_from_table(alphas, u), atol=1e-15, rtol=1e-14)


@pytest.mark.parametrize("pattern", YBE_RATE_PATTERNS)
def test_rate_patterns_solve_ybe(pattern):
    f = lambda u: build_r16(pattern, u)
    assert family_residual(f, YBE4, draw_pairs(10, 3)) < 1e-10


def test_generic_rates_fail_ybe():
    f = lambda u: build_r16((1, 0.5, 0.3, 0.2), u)
    assert family_residual(f, YBE4, draw_pairs(3, 3)) > 1e-4


def test_r16_pattern_agrees_with_contraction_oracle():
    f = lambda u: build_r16((1, 0, 0, 1), u)
    assert difference_residual(f, f, (4, 4, 4), 0, 1, 0.3, -0.2) < 1e-12


def test_symmetric_parities_all_solve_ybe():
    pairs = draw_pairs(4, 9)
    for bits in itertools.product((0, 1), repeat=3):
        par = symmetric_parity(*bits)
        assert par.is_symmetric()
        assert family_residual(lambda u: build_r16((1, 1, 1, 1), u, par), YBE4, pairs) < 1e-10


def test_table_parity_is_symmetric_and_antisymmetric():
    assert TABLE_PARITY.is_symmetric()
    for i, j in itertools.combinations(range(4), 2):
        assert (TABLE_PARITY.parity(None, i, 0, j, 0) + TABLE_PARITY.parity(None, j, 0, i, 0)) % 2 == 1


def test_pair_parity_brute_force_classification():
    # all 2^6 antisymmetric color-independent assignments: exactly the 16 with
    # p(0,3) != p(1,2), p(0,1) != p(2,3), p(0,2) == p(1,3) or the exact complement pass
    pairs = list(itertools.combinations(range(4), 2))
    draws = draw_pairs(2, 4)
    passing = []
    for bits in itertools.product((0, 1), repeat=6):
        par = ParityAssignment.from_pairs(4, dict(zip(pairs, bits)))
        if family_residual(lambda u: build_r16((1, 1, 1, 1), u, par), YBE4, draws) < 1e-10:
            passing.append(dict(zip(pairs, bits)))
    assert len(passing) == 16
    for p in passing:
        first = p[(0, 3)] != p[(1, 2)] and p[(0, 1)] != p[(2, 3)] and p[(0, 2)] == p[(1, 3)]
        second = p[(0, 3)] == p[(1, 2)] and p[(0, 1)] == p[(2, 3)] and p[(0, 2)] != p[(1, 3)]
        assert first or second


def test_unitary_normalization_of_r16():
    rng = np.random.default_rng(17)
    for _ in range(10):
        alphas = rng.uniform(-1, 1, 4)
        u = rng.uniform(-1, 1)
        assert verify_unitary(build_r16_unitary(alphas, u)).max_abs_residual < 1e-12


def test_pauli_forms_match_entry_forms():
    for lit, op in zip(M_BAR_ENTRIES + M_BREVE_ENTRIES, M_BAR + M_BREVE):
        assert np.array_equal(np.asarray(lit, dtype=complex), op)


def test_pauli_identities():
    out = pauli_identities_check()
    for key in ("M_bar_x", "M_bar_y", "M_bar_z", "M_breve_x", "M_breve_y", "M_breve_z", "M_bar_commute", "breve_closure"):
        assert out[key] < 1e-15, key
    assert out["breve_closure_constant"] == {"re": 0.0, "im": -2.0}
    assert out["r44_derivative_vs_density"] < 1e-8
    assert out["r44_coupling"]["re"] == pytest.approx(0.0, abs=1e-9)
    assert out["r44_coupling"]["im"] == pytest.approx(1.0, abs=1e-9)
    assert out["r2222_derivative"] < 1e-8


def test_generators_square_to_minus_three():
    G = r44_generator()
    assert np.allclose(G @ G, -3 * np.eye(16), atol=1e-15)
    assert np.allclose(build_r44(0.4), np.cosh(0.4) * np.eye(16) + np.sinh(0.4) * G)
    d = (build_r16((1, 1, 1, 1), 1e-6) - build_r16((1, 1, 1, 1), -1e-6)) / 2e-6
    assert np.allclose(d @ d, -3 * np.eye(16), atol=1e-8)


@pytest.mark.parametrize("eps", [(1, 1, 1), (1, -1, 1), (-1, 1, -1)])
def test_r44_solves_ybe(eps):
    f = lambda u: build_r44(u, eps)
    assert family_residual(f, YBE4, draw_pairs(5, 2)) < 1e-9


@pytest.mark.parametrize("signs", list(itertools.product((1, -1), repeat=3)))
def test_r2222_solves_gybe_241(signs):
    f = lambda u: build_r2222(u, *signs)
    assert family_residual(f, GybeShape.dkp(2, 4, 1), draw_pairs(3, 5)) < 1e-10


def test_h44_density_is_hermitian_up_to_phase():
    h = h44_density()
    assert np.allclose(h, h.conj().T) or np.allclose(h, -h.conj().T)


def test_fractional_search_catalog():
    cat = parity_search("fractional-phases", "gybe-2-4-1", budget=64, seed=1)
    assert len(cat) == 8
    for entry in cat:
        ex, ey, ez = entry["assignment"]["eps"]
        assert ex in ("1", "-1") and ey in ("i", "-i") and ez in ("i", "-i")
        assert entry["max_residual"] < 1e-10
    keys = [tuple(e["assignment"]["parity"]) for e in cat]
    assert keys == sorted(keys)


def test_symmetric_search_finds_all_eight():
    cat = parity_search("symmetric-constrained", "ybe-4-2-1", budget=8, seed=0)
    assert [tuple(e["assignment"]["free_bits"]) for e in cat] == list(itertools.product((0, 1), repeat=3))


def test_search_budget_and_target_validation():
    assert parity_search("symmetric-constrained", budget=0) == []
    assert len(parity_search("symmetric-constrained", budget=3)) == 3
    with pytest.raises(UnknownTargetError):
        parity_search("symmetric-constrained", "ybe-9-9-9")
    with pytest.raises(GybeError):
        parity_search("sideways")


def test_random_search_is_deterministic_and_sound():
    a = parity_search("random-unconstrained", budget=40, seed=5)
    b = parity_search("random-unconstrained", budget=40, seed=5)
    assert a == b
    assert all(e["max_residual"] < 1e-10 for e in a)


def test_search_is_thread_count_independent(monkeypatch):
    monkeypatch.setenv("GYBE_FORGE_THREADS", "1")
    one = parity_search("fractional-phases", budget=64, seed=2)
    monkeypatch.setenv("GYBE_FORGE_THREADS", "4")
    four = parity_search("fractional-phases", budget=64, seed=2)
    assert one == four
