"""Graded and colored permutation operators and their Yang-Baxterizations.

A colored permutation on ``V_N ⊗ V_N`` swaps the two factors and relabels
each state through a color map ``tau``; grading attaches a phase
``exp(i pi p)`` to every entry.  Entry ``(out=(j1, j2), in=(i1, i2))`` is
``exp(i pi p(e, i1, j1)) [i1 = tau(j2)] [i2 = tau(j1)]``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import DimensionError, GybeError, UnknownTargetError
from .tensor import CDTYPE, I2, SIGMA_X, SIGMA_Y, SIGMA_Z, identity
from .verify import GybeShape, _thread_cap, draw_pairs, spectral_residual


@dataclass(frozen=True)
class PermSpec:
    N: int
    tau: tuple
    name: str = ""

    def __post_init__(self):
        tau = tuple(int(x) for x in self.tau)
        object.__setattr__(self, "tau", tau)
        if len(tau) != self.N or sorted(tau) != list(range(self.N)):
            raise GybeError(f"tau={tau} is not a permutation of 0..{self.N - 1}")

    @property
    def involutive(self) -> bool:
        return all(self.tau[self.tau[i]] == i for i in range(self.N))

    @classmethod
    def trivial(cls, N: int) -> "PermSpec":
        return cls(N, tuple(range(N)), "0")


COLORS_N2 = {"0": PermSpec(2, (0, 1), "0"), "tau": PermSpec(2, (1, 0), "tau")}
COLORS_N4 = {
    "0": PermSpec(4, (0, 1, 2, 3), "0"),
    "a": PermSpec(4, (1, 0, 3, 2), "a"),
    "b": PermSpec(4, (2, 3, 0, 1), "b"),
    "c": PermSpec(4, (3, 2, 1, 0), "c"),
}


@dataclass(frozen=True)
class ParityAssignment:
    """Parities ``p`` of graded permutation entries; the phase is ``exp(i pi p)``.

    Keys are ``(e, i1, j1)`` or, with ``full_index``, ``(e, i1, i2, j1, j2)``.
    ``e = None`` in a key makes it apply to every color.  Missing keys and
    diagonal entries (``i1 == j1``) carry parity 0.
    """

    N: int
    values: Mapping = field(default_factory=dict)
    full_index: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        width = 5 if self.full_index else 3
        for key in self.values:
            if len(key) != width:
                raise GybeError(f"parity key {key} should have {width} components")

    def parity(self, e, i1, i2, j1, j2) -> float:
        if i1 == j1 and (not self.full_index or i2 == j2):
            return 0.0
        idx = (i1, i2, j1, j2) if self.full_index else (i1, j1)
        for key in ((e, *idx), (None, *idx)):
            if key in self.values:
                return float(self.values[key])
        return 0.0

    def phase(self, e, i1, i2, j1, j2) -> complex:
        p = self.parity(e, i1, i2, j1, j2)
        if p == 0:
            return 1.0
        if p % 2 == 1:
            return -1.0
        return complex(np.exp(1j * np.pi * p))

    @classmethod
    def from_pairs(cls, N: int, pairs: Mapping[tuple, float]) -> "ParityAssignment":
        """Color-independent, antisymmetric parities from ``{(i, j): p}`` with ``i < j``."""
        vals = {}
        for (i, j), p in pairs.items():
            vals[(None, i, j)] = p % 2
            vals[(None, j, i)] = (p + 1) % 2
        return cls(N, vals)

    def pair_bits(self) -> tuple:
        """Color-independent parities ``p(i, j)`` for ``i < j``, lexicographic."""
        return tuple(
            self.parity(None, i, 0, j, 0) for i, j in itertools.combinations(range(self.N), 2)
        )

    def is_symmetric(self) -> bool:
        """Antisymmetry, color independence and the three N=4 linking relations."""
        if self.full_index or self.N != 4:
            return False
        if any(k[0] is not None for k in self.values):
            return False
        p = lambda i, j: self.parity(None, i, 0, j, 0) % 2
        for i, j in itertools.combinations(range(4), 2):
            if (p(j, i) - p(i, j) - 1) % 2:
                return False
        return (
            (p(0, 3) - p(1, 2) - 1) % 2 == 0
            and (p(0, 1) - p(2, 3) - 1) % 2 == 0
            and (p(0, 2) - p(1, 3)) % 2 == 0
        )


def symmetric_parity(b12: int, b13: int, b14: int) -> ParityAssignment:
    """N=4 symmetric parity from its three free bits ``p(1,2), p(1,3), p(1,4)`` (1-based).

    The remaining pairs follow from ``p(3,4) = p(1,2) + 1``,
    ``p(2,3) = p(1,4) + 1`` and ``p(2,4) = p(1,3)``.
    """
    pairs = {
        (0, 1): b12,
        (0, 2): b13,
        (0, 3): b14,
        (1, 2): (b14 + 1) % 2,
        (1, 3): b13,
        (2, 3): (b12 + 1) % 2,
    }
    return ParityAssignment.from_pairs(4, pairs)


# Parities reproducing the explicit 16x16 table (all signs eps = +1).
TABLE_PARITY = symmetric_parity(1, 1, 0)

# Parities of the N=2 operators P_g and P_g^tau.
N2_PARITY = ParityAssignment.from_pairs(2, {(0, 1): 1})


def build_graded_perm(spec: PermSpec, parity: ParityAssignment, e=None) -> np.ndarray:
    if parity.N != spec.N:
        raise DimensionError(f"parity is for N={parity.N}, permutation for N={spec.N}")
    n, tau = spec.N, spec.tau
    e = spec.name if e is None else e
    out = np.zeros((n * n, n * n), dtype=CDTYPE)
    for j1 in range(n):
        for j2 in range(n):
            i1, i2 = tau[j2], tau[j1]
            out[j1 * n + j2, i1 * n + i2] = parity.phase(e, i1, i2, j1, j2)
    return out


def yang_baxterize(P, alpha, u) -> np.ndarray:
    """``(exp(alpha u) P + exp(-alpha u) P^dagger) / 2``."""
    P = np.asarray(P, dtype=CDTYPE)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DimensionError("yang_baxterize needs a square matrix")
    x = alpha * u
    return 0.5 * (np.exp(x) * P + np.exp(-x) * P.conj().T)


def build_perm_superposition(
    terms: Sequence[tuple], parity: ParityAssignment, u
) -> np.ndarray:
    """Sum of Yang-Baxterized colored graded permutations.

    ``terms`` holds ``(PermSpec, rate)`` pairs; a rate may be a number or a
    callable returning the effective argument for ``u``.
    """
    if not terms:
        raise GybeError("superposition needs at least one term")
    n = terms[0][0].N
    if any(spec.N != n for spec, _ in terms):
        raise DimensionError("all colored permutations must share N")
    total = np.zeros((n * n, n * n), dtype=CDTYPE)
    for spec, rate in terms:
        P = build_graded_perm(spec, parity)
        if callable(rate):
            total += yang_baxterize(P, 1.0, rate(u))
        else:
            total += yang_baxterize(P, rate, u)
    return total


def build_r16(alphas: Sequence, u, parity: ParityAssignment = TABLE_PARITY) -> np.ndarray:
    """Four-color N=4 superposition with rates ``(alpha_0, alpha_a, alpha_b, alpha_c)``."""
    if len(alphas) != 4:
        raise GybeError("need one rate per color 0, a, b, c")
    terms = [(COLORS_N4[c], a) for c, a in zip("0abc", alphas)]
    return build_perm_superposition(terms, parity, u)


def r16_norm_factor(alphas: Sequence, u) -> float:
    s = np.sinh(np.asarray(alphas, dtype=float) * u)
    return float(1.0 / np.sqrt(1.0 + np.sum(s * s)))


def build_r16_unitary(alphas: Sequence, u, parity: ParityAssignment = TABLE_PARITY) -> np.ndarray:
    return r16_norm_factor(alphas, u) * build_r16(alphas, u, parity)


def n2_braid_relations() -> dict:
    """Residuals of the braid relations among the N=2 operators P_g and P_g^tau.

    Words read left to right as operators on sites (12), (23), (12) versus
    (23), (12), (23); ``g`` is P_g and ``t`` is P_g^tau.
    """
    P = {
        "g": build_graded_perm(COLORS_N2["0"], N2_PARITY),
        "t": build_graded_perm(COLORS_N2["tau"], N2_PARITY),
    }
    e12 = {k: np.kron(v, I2) for k, v in P.items()}
    e23 = {k: np.kron(I2, v) for k, v in P.items()}
    out = {}
    for lhs, rhs in (("ggg", "ggg"), ("ttt", "ttt"), ("gtg", "tgt"), ("tgt", "gtg"), ("ttg", "gtt")):
        left = e12[lhs[0]] @ e23[lhs[1]] @ e12[lhs[2]]
        right = e23[rhs[0]] @ e12[rhs[1]] @ e23[rhs[2]]
        out[f"{lhs}={rhs}"] = float(np.max(np.abs(left - right)))
    return out


def build_r22_two_parameter(u, uprime) -> np.ndarray:
    """N=2 sum ``R^0(u) + R^tau(u')``."""
    terms = [(COLORS_N2["0"], lambda _: u), (COLORS_N2["tau"], lambda _: uprime)]
    return build_perm_superposition(terms, N2_PARITY, 0.0)


# Rates for which the four-color superposition solves YBE (alpha = 1).
YBE_RATE_PATTERNS = (
    (1, 1, 1, 1),
    (1, 0, 1, 0),
    (0, 1, 0, 1),
    (1, 0, 0, 1),
    (0, 1, 1, 0),
    (1, 1, 0, 0),
    (0, 0, 1, 1),
)


# -- Pauli representation of the N=4 operators ------------------------------------

M_BAR = (np.kron(I2, SIGMA_X), np.kron(SIGMA_X, I2), np.kron(SIGMA_X, SIGMA_X))
M_BREVE = (
    1j * np.kron(SIGMA_Z, SIGMA_Y),
    1j * np.kron(SIGMA_Y, I2),
    -1j * np.kron(SIGMA_X, SIGMA_Y),
)

# The same operators written out entrywise.
M_BAR_ENTRIES = (
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
    [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
)
M_BREVE_ENTRIES = (
    [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
)


def r44_generator(eps: Sequence = (1, 1, 1)) -> np.ndarray:
    return sum(e * np.kron(a, b) for e, a, b in zip(eps, M_BREVE, M_BAR))


def build_r44(u, eps: Sequence = (1, 1, 1)) -> np.ndarray:
    """``cosh(u) I + sinh(u) sum_k eps_k M_breve_k ⊗ M_bar_k``."""
    return np.cosh(u) * identity(16) + np.sinh(u) * r44_generator(eps)


def r2222_eps(sx: int = 1, sy: int = 1, sz: int = 1) -> tuple:
    """Phases giving the Pauli-string signs ``(sx, sy, sz)`` of the (2,4,1) family."""
    return (sx, -1j * sy, 1j * sz)


def r2222_generator(sx: int = 1, sy: int = 1, sz: int = 1) -> np.ndarray:
    k = np.kron
    return (
        sx * 1j * k(k(SIGMA_Z, SIGMA_Y), k(I2, SIGMA_X))
        + sy * k(k(SIGMA_Y, I2), k(SIGMA_X, I2))
        + sz * k(k(SIGMA_X, SIGMA_Y), k(SIGMA_X, SIGMA_X))
    )


def build_r2222(u, sx: int = 1, sy: int = 1, sz: int = 1) -> np.ndarray:
    return np.cosh(u) * identity(16) + np.sinh(u) * r2222_generator(sx, sy, sz)


def h44_density() -> np.ndarray:
    """Two-site term of the N=4 chain Hamiltonian, without its coupling constant."""
    k = np.kron
    return (
        k(k(SIGMA_Z, SIGMA_Y), k(I2, SIGMA_X))
        + k(k(SIGMA_Y, I2), k(SIGMA_X, I2))
        - k(k(SIGMA_X, SIGMA_Y), k(SIGMA_X, SIGMA_X))
    )


def fit_scale(target, basis) -> tuple[complex, float]:
    """Least-squares ``c`` minimizing ``|target - c basis|``; returns (c, max residual)."""
    t = np.asarray(target, dtype=CDTYPE).ravel()
    b = np.asarray(basis, dtype=CDTYPE).ravel()
    c = complex(np.vdot(b, t) / np.vdot(b, b))
    return c, float(np.max(np.abs(t - c * b)))


def pauli_identities_check(step: float = 1e-6) -> dict:
    """Residuals of the Pauli-product identities of the N=4 operators."""
    out = {}
    for name, lit, op in zip("xyz", M_BAR_ENTRIES, M_BAR):
        out[f"M_bar_{name}"] = float(np.max(np.abs(np.asarray(lit) - op)))
    for name, lit, op in zip("xyz", M_BREVE_ENTRIES, M_BREVE):
        out[f"M_breve_{name}"] = float(np.max(np.abs(np.asarray(lit) - op)))
    out["M_bar_commute"] = max(
        float(np.max(np.abs(a @ b - b @ a))) for a, b in itertools.combinations(M_BAR, 2)
    )
    # i M_breve close like an su(2) triple: [A_x, A_y] = c A_z cyclically, one common c.
    A = [1j * m for m in M_BREVE]
    ratios, worst = [], 0.0
    for p, q, r in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c, res = fit_scale(A[p] @ A[q] - A[q] @ A[p], A[r])
        ratios.append(c)
        worst = max(worst, res)
    out["breve_closure"] = max(worst, max(abs(c - ratios[0]) for c in ratios))
    out["breve_closure_constant"] = {"re": ratios[0].real, "im": ratios[0].imag}
    d44 = (build_r44(step) - build_r44(-step)) / (2 * step)
    j, res = fit_scale(d44, h44_density())
    out["r44_derivative_vs_density"] = res
    out["r44_coupling"] = {"re": j.real, "im": j.imag}
    d2222 = (build_r2222(step) - build_r2222(-step)) / (2 * step)
    out["r2222_derivative"] = float(np.max(np.abs(d2222 - r2222_generator())))
    return out


# -- parity search ------------------------------------------------------------------

SEARCH_MODES = ("symmetric-constrained", "random-unconstrained", "fractional-phases")

SEARCH_TARGETS = {
    "ybe-4-2-1": GybeShape.dkp(4, 2, 1),
    "gybe-2-4-2": GybeShape.dkp(2, 4, 2),
    "gybe-2-4-1": GybeShape.dkp(2, 4, 1),
    "gybe-2-4-3": GybeShape.dkp(2, 4, 3),
}


def target_shape(target: str) -> GybeShape:
    try:
        return SEARCH_TARGETS[target]
    except KeyError as exc:
        raise UnknownTargetError(
            f"unknown target {target!r}; expected one of {sorted(SEARCH_TARGETS)}"
        ) from exc


def family_residual(family: Callable, shape: GybeShape, pairs: Iterable[tuple]) -> float:
    worst = 0.0
    for u, v in pairs:
        res = spectral_residual(family, family, shape.dims, shape.span_a[0], shape.span_b[0], u, v)
        worst = max(worst, res.max_abs)
    return worst


def _phase_label(z: complex) -> str:
    for lab, val in (("1", 1), ("-1", -1), ("i", 1j), ("-i", -1j)):
        if abs(z - val) < 1e-12:
            return lab
    return repr(z)


def _candidates(mode: str, budget: int, seed: int, full_index: bool):
    """Yield ``(sort key, assignment json, family factory)`` in lexicographic order."""
    if mode == "symmetric-constrained":
        for bits in itertools.product((0, 1), repeat=3):
            par = symmetric_parity(*bits)
            yield bits, {"free_bits": list(bits), "pairs": list(par.pair_bits())}, par
    elif mode == "fractional-phases":
        phases = (1, -1, 1j, -1j)
        exps = {1: 0.0, -1: 1.0, 1j: 0.5, -1j: 1.5}
        for combo in itertools.product(phases, repeat=3):
            key = tuple(exps[z] for z in combo)
            yield key, {"eps": [_phase_label(z) for z in combo], "parity": list(key)}, combo
    elif mode == "random-unconstrained":
        rng = np.random.default_rng(seed)
        idx = (
            [(i1, i2, j1, j2) for i1, i2, j1, j2 in itertools.product(range(4), repeat=4)]
            if full_index
            else [(i, j) for i in range(4) for j in range(4)]
        )
        seen = set()
        for _ in range(budget):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=4 * len(idx)))
            if bits in seen:
                continue
            seen.add(bits)
            vals = {}
            for n, (e, k) in enumerate(itertools.product("0abc", idx)):
                vals[(e, *k)] = bits[n]
            par = ParityAssignment(4, vals, full_index=full_index)
            yield bits, {"bits": "".join(map(str, bits))}, par
    else:
        raise GybeError(f"unknown search mode {mode!r}; expected one of {SEARCH_MODES}")


def parity_search(
    mode: str,
    target: Optional[str] = None,
    budget: int = 64,
    seed: int = 0,
    tol: float = 1e-10,
    alphas: Sequence = (1, 1, 1, 1),
    n_pairs: int = 10,
    full_index: bool = False,
) -> list[dict]:
    """Catalog of passing assignments, sorted lexicographically by assignment.

    ``budget`` caps the number of candidates evaluated; 0 returns an empty
    catalog.
    """
    if mode not in SEARCH_MODES:
        raise GybeError(f"unknown search mode {mode!r}; expected one of {SEARCH_MODES}")
    if target is None:
        target = "gybe-2-4-1" if mode == "fractional-phases" else "ybe-4-2-1"
    shape = target_shape(target)
    if budget <= 0:
        return []
    pairs = draw_pairs(n_pairs, seed)
    cands = list(itertools.islice(_candidates(mode, budget, seed, full_index), budget))

    def evaluate(cand):
        key, assignment, obj = cand
        if mode == "fractional-phases":
            family = lambda u, eps=obj: build_r44(u, eps)
        else:
            family = lambda u, par=obj: build_r16(alphas, u, par)
        return key, assignment, family_residual(family, shape, pairs)

    with ThreadPoolExecutor(max_workers=_thread_cap()) as pool:
        results = list(pool.map(evaluate, cands))
    results.sort(key=lambda r: r[0])
    return [
        {"assignment": a, "target": target, "max_residual": res, "samples": len(pairs)}
        for _, a, res in results
        if res <= tol
    ]
