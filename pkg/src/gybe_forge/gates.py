"""Unitary two-qubit gates from the two-rate hyperbolic block, and their entangling power.

Basis order is ``|++>, |+->, |-+>, |-->``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import TrigBlockParams, build_trig_block
from .errors import DimensionError
from .tensor import CDTYPE

BASIS_LABELS = ("++", "+-", "-+", "--")


@dataclass(frozen=True)
class GateParams:
    theta_u: float
    epsilon_u: float
    alpha_phase: float = 0.0

    def to_json(self) -> dict:
        return {"theta_u": self.theta_u, "epsilon_u": self.epsilon_u, "alpha_phase": self.alpha_phase}


@dataclass(frozen=True)
class TwoQubitState:
    coefficients: np.ndarray
    flags: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=CDTYPE).reshape(-1)
        if c.size != 4:
            raise DimensionError("a two-qubit state has four coefficients")
        object.__setattr__(self, "coefficients", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def to_json(self) -> dict:
        c = self.coefficients
        return {
            "basis": list(BASIS_LABELS),
            "re": [float(x) for x in c.real],
            "im": [float(x) for x in c.imag],
            "flags": list(self.flags),
        }


def gate_norm_factor(gamma, beta, u) -> float:
    return float(np.sqrt(2.0) / np.sqrt(np.cosh(2 * gamma * u) + np.cosh(2 * beta * u)))


def unitarize(gamma: float, beta: float, u: float, alpha_phase: float = 0.0):
    """Normalized block with signs (1, -1, -1) and ``q = exp(i alpha)``.

    Returns the gate and the angles with
    ``cos(theta_u) = n cosh(gamma u)``, ``sin(theta_u) = n sinh(beta u)``,
    ``cos(epsilon_u) = n cosh(beta u)``, ``sin(epsilon_u) = n sinh(gamma u)``.
    """
    n = gate_norm_factor(gamma, beta, u)
    params = TrigBlockParams(gamma, beta, np.exp(1j * alpha_phase), 1, -1, -1)
    gate = n * build_trig_block(params, u)
    theta = float(np.arctan2(n * np.sinh(beta * u), n * np.cosh(gamma * u)))
    eps = float(np.arctan2(n * np.sinh(gamma * u), n * np.cosh(beta * u)))
    return gate, GateParams(theta, eps, float(alpha_phase))


def gate_from_params(p: GateParams) -> np.ndarray:
    ct, st = np.cos(p.theta_u), np.sin(p.theta_u)
    ce, se = np.cos(p.epsilon_u), np.sin(p.epsilon_u)
    ph = np.exp(1j * p.alpha_phase)
    g = np.zeros((4, 4), dtype=CDTYPE)
    g[0, 0] = g[3, 3] = ct
    g[0, 3] = ph * st
    g[3, 0] = -np.conj(ph) * st
    g[1, 1] = g[2, 2] = ce
    g[1, 2] = se
    g[2, 1] = -se
    return g


def unitarity_defect(m) -> float:
    m = np.asarray(m, dtype=CDTYPE)
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def apply_gate(gate, basis_index: int, convention: str = "row", tol: float = 1e-10) -> TwoQubitState:
    """Image of a product basis state.

    With ``convention="row"`` input ``i`` becomes ``sum_j gate[i, j] |j>``,
    i.e. the gate acts on the column vector of basis kets.  ``"column"``
    gives the usual ``gate @ e_i``.
    """
    g = np.asarray(gate, dtype=CDTYPE)
    if g.shape != (4, 4):
        raise DimensionError("two-qubit gates are 4x4")
    if not 0 <= basis_index < 4:
        raise DimensionError(f"basis index {basis_index} outside 0..3")
    if convention == "row":
        coeffs = g[basis_index, :]
    elif convention == "column":
        coeffs = g[:, basis_index]
    else:
        raise ValueError(f"unknown convention {convention!r}")
    flags = () if unitarity_defect(g) <= tol else ("non-unitary",)
    return TwoQubitState(coeffs.copy(), flags)


def concurrence(state) -> float:
    """``2 |a d - b c|`` after normalizing the coefficients."""
    if isinstance(state, TwoQubitState):
        c = state.coefficients
    else:
        c = TwoQubitState(state).coefficients
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise DimensionError("zero vector has no concurrence")
    a, b, cc, d = c / nrm
    return float(2 * abs(a * d - b * cc))


def is_normalized(state: TwoQubitState, tol: float = 1e-12) -> bool:
    return abs(state.norm - 1.0) <= tol


def time_schedule(t: float, alpha_phase: float = 0.0) -> GateParams:
    """Independent evolution of the two state pairs: ``epsilon_u = pi t / 4``, ``theta_u = pi (t - 1) / 4``."""
    return GateParams(np.pi * (t - 1) / 4, np.pi * t / 4, alpha_phase)


def gate_concurrences(gate, convention: str = "row") -> list[float]:
    return [concurrence(apply_gate(gate, i, convention)) for i in range(4)]
