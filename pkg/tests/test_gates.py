import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gybe_forge.errors import DimensionError
from gybe_forge.gates import (
    GateParams,
    TwoQubitState,
    apply_gate,
    concurrence,
    gate_concurrences,
    gate_from_params,
    is_normalized,
    time_schedule,
    unitarity_defect,
    unitarize,
)
from oracles import pure_state_concurrence

PP, PM, MP, MM = np.eye(4)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-np.pi, np.pi))
def test_normalized_gate_is_unitary(g, b, u, alpha):
    gate, params = unitarize(g, b, u, alpha)
    assert unitarity_defect(gate) < 1e-12
    assert np.allclose(gate_from_params(params), gate, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.9])
def test_rows_give_the_four_output_states(alpha):
    th, ep = 0.3, 1.1
    gate = gate_from_params(GateParams(th, ep, alpha))
    ph = np.exp(1j * alpha)
    expected = [
        np.cos(th) * PP + ph * np.sin(th) * MM,
        np.cos(ep) * PM + np.sin(ep) * MP,
        np.cos(ep) * MP - np.sin(ep) * PM,
        np.cos(th) * MM - np.conj(ph) * np.sin(th) * PP,
    ]
    for i, exp in enumerate(expected):
        st_ = apply_gate(gate, i)
        assert np.max(np.abs(st_.coefficients - exp)) < 1e-12
        assert is_normalized(st_)
        assert st_.flags == ()


def test_column_convention_is_the_transpose():
    gate = gate_from_params(GateParams(0.3, 1.1, 0.4))
    for i in range(4):
        assert np.array_equal(apply_gate(gate, i, "column").coefficients, gate[:, i])


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_concurrences_of_first_two_rows(th, ep):
    gate = gate_from_params(GateParams(th, ep, 0.2))
    c = gate_concurrences(gate)
    assert abs(c[0] - abs(np.sin(2 * th))) < 1e-12
    assert abs(c[1] - abs(np.sin(2 * ep))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3), min_size=4, max_size=4).filter(lambda c: np.linalg.norm(c) > 0.1))
def test_concurrence_matches_reduced_purity(c):
    # squares avoid the sqrt amplification of round-off near product states
    assert abs(concurrence(TwoQubitState(c)) ** 2 - pure_state_concurrence(c) ** 2) < 1e-12


@pytest.mark.parametrize("t", [-3, -1, 1, 3, 5])
def test_schedule_at_odd_times(t):
    c = gate_concurrences(gate_from_params(time_schedule(t)))
    assert c[0] == pytest.approx(0, abs=1e-12) and c[1] == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("t", [-2, 0, 2, 4])
def test_schedule_at_even_times(t):
    c = gate_concurrences(gate_from_params(time_schedule(t)))
    assert c[0] == pytest.approx(1, abs=1e-12) and c[1] == pytest.approx(0, abs=1e-12)


def test_non_unitary_input_is_flagged():
    st_ = apply_gate(2 * np.eye(4), 0)
    assert "non-unitary" in st_.flags


def test_gate_errors():
    with pytest.raises(DimensionError):
        apply_gate(np.eye(3), 0)
    with pytest.raises(DimensionError):
        apply_gate(np.eye(4), 4)
    with pytest.raises(ValueError):
        apply_gate(np.eye(4), 0, "diagonal")
    with pytest.raises(DimensionError):
        TwoQubitState([1, 0, 0])
    with pytest.raises(DimensionError):
        concurrence([0, 0, 0, 0])


def test_quarter_period_gives_bell_states():
    gate = gate_from_params(GateParams(np.pi / 4, np.pi / 4, 0.0))
    assert gate_concurrences(gate) == pytest.approx([1, 1, 1, 1], abs=1e-12)
    m = np.fliplr(np.diag([1, 1, -1, -1]))
    assert np.allclose(gate, (np.eye(4) + m) / np.sqrt(2))
