"""Numerical residuals for every braid / Yang-Baxter equation variant.

All spectral checks use the difference form

    A(u - v) B(u) A(v) = B(v) A(u) B(u - v)

where ``A`` and ``B`` are the two embeddings of the check matrices on the
three-block chain.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import DimensionError, SingularParameterError
from .tensor import Residual, as_cmatrix, dagger, embed_operator, identity, residual_norm

Family = Callable[[complex], np.ndarray]

FORMS = (
    "constant-braid",
    "spectral-difference",
    "spectral-second-kind",
    "inhomogeneous-i",
    "inhomogeneous-ii",
    "factorized",
)

DEFAULT_TOL = 1e-10
LARGE_TOL = 1e-9


def default_tolerance(total_dim: int) -> float:
    return LARGE_TOL if total_dim >= 64 else DEFAULT_TOL


@dataclass(frozen=True)
class GybeShape:
    """Which sites the two check matrices act on.

    ``span_a`` and ``span_b`` are ``(start, length)`` pairs over ``dims``.
    """

    dims: tuple
    span_a: tuple
    span_b: tuple
    form: str = "spectral-difference"

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "span_a", tuple(self.span_a))
        object.__setattr__(self, "span_b", tuple(self.span_b))
        if self.form not in FORMS:
            raise DimensionError(f"unknown equation form {self.form!r}")
        for start, length in (self.span_a, self.span_b):
            if start < 0 or length < 1 or start + length > len(self.dims):
                raise DimensionError(f"span ({start}, {length}) does not fit dims {self.dims}")

    @classmethod
    def dkp(cls, d: int, k: int, p: int, form: str = "spectral-difference") -> "GybeShape":
        """The homogeneous (d, k, p) shape: ``R ⊗ I^p`` against ``I^p ⊗ R``."""
        return cls((d,) * (k + p), (0, k), (p, k), form)

    @classmethod
    def inhomogeneous(cls, dims: Sequence[int], form: str = "inhomogeneous-ii") -> "GybeShape":
        """Three-site shape with the first operator on sites 0,1 and the second on 1,2."""
        return cls(tuple(dims), (0, 2), (1, 2), form)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def span_dim(self, which: str) -> int:
        start, length = self.span_a if which == "a" else self.span_b
        return int(np.prod(self.dims[start : start + length]))

    def label(self) -> str:
        if len(set(self.dims)) == 1 and self.span_a[0] == 0 and self.span_a[1] == self.span_b[1]:
            return f"({self.dims[0]},{self.span_a[1]},{self.span_b[0]})"
        return f"dims={list(self.dims)} a={list(self.span_a)} b={list(self.span_b)}"


@dataclass
class VerificationReport:
    equation_id: str
    samples: int
    max_abs_residual: float
    frobenius_residual: float
    tolerance: float
    seed: Optional[int] = None
    draws: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_residual <= self.tolerance)

    def to_json(self) -> dict:
        return {
            "equation_id": self.equation_id,
            "samples": self.samples,
            "max_abs_residual": self.max_abs_residual,
            "frobenius_residual": self.frobenius_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
            "draws": [[_jsonable(x) for x in d] for d in self.draws],
            "details": self.details,
        }


def _jsonable(x):
    x = complex(x)
    return x.real if x.imag == 0 else [x.real, x.imag]


def _report(eq_id: str, res: Residual, tol: float, draws=(), **details) -> VerificationReport:
    return VerificationReport(
        equation_id=eq_id,
        samples=1,
        max_abs_residual=res.max_abs,
        frobenius_residual=res.frobenius,
        tolerance=tol,
        draws=[list(d) for d in draws],
        details=details,
    )


def _check_dim(m: np.ndarray, expected: int, what: str):
    if m.shape != (expected, expected):
        raise DimensionError(f"{what} has shape {m.shape}, expected {expected}x{expected}")


def triple_residual(a_w, b_u, a_v, b_v, a_u, b_w) -> Residual:
    """Residual of ``a_w b_u a_v - b_v a_u b_w``."""
    return residual_norm(a_w @ b_u @ a_v, b_v @ a_u @ b_w)


def verify_constant(
    r, shape: GybeShape, r_b=None, tol: Optional[float] = None
) -> VerificationReport:
    """Braid relation ``A B A = B A B`` for constant matrices."""
    ra = as_cmatrix(r, square=True)
    rb = ra if r_b is None else as_cmatrix(r_b, square=True)
    _check_dim(ra, shape.span_dim("a"), "first operator")
    _check_dim(rb, shape.span_dim("b"), "second operator")
    a = embed_operator(ra, shape.dims, shape.span_a[0])
    b = embed_operator(rb, shape.dims, shape.span_b[0])
    res = residual_norm(a @ b @ a, b @ a @ b)
    tol = default_tolerance(shape.total_dim) if tol is None else tol
    return _report(f"constant {shape.label()}", res, tol)


def spectral_residual(fa: Family, fb: Family, dims, start_a: int, start_b: int, u, v) -> Residual:
    """Difference-form residual for two families embedded at the given sites."""
    w = u - v
    emb_a = lambda x: embed_operator(fa(x), dims, start_a)
    emb_b = lambda x: embed_operator(fb(x), dims, start_b)
    return triple_residual(emb_a(w), emb_b(u), emb_a(v), emb_b(v), emb_a(u), emb_b(w))


def verify_spectral(
    family: Family,
    shape: GybeShape,
    u,
    v,
    family_b: Optional[Family] = None,
    tol: Optional[float] = None,
) -> VerificationReport:
    fb = family if family_b is None else family_b
    _check_dim(as_cmatrix(family(0.0)), shape.span_dim("a"), "family")
    _check_dim(as_cmatrix(fb(0.0)), shape.span_dim("b"), "second family")
    res = spectral_residual(family, fb, shape.dims, shape.span_a[0], shape.span_b[0], u, v)
    tol = default_tolerance(shape.total_dim) if tol is None else tol
    return _report(f"spectral {shape.label()}", res, tol, draws=[(u, v)])


def verify_inhomogeneous(
    families: Mapping[tuple, Family],
    dims: Sequence[int],
    u,
    v,
    full_set: bool = False,
    tol: Optional[float] = None,
) -> VerificationReport:
    """Inhomogeneous equation on ``V_N1 ⊗ V_N2 ⊗ V_N3``.

    ``families`` maps a site-dimension pair ``(Na, Nb)`` to the family acting
    on ``V_Na ⊗ V_Nb``.  With ``full_set`` the two cyclically rotated
    equations (on ``V_N2 ⊗ V_N3 ⊗ V_N1`` and ``V_N3 ⊗ V_N1 ⊗ V_N2``) are
    checked as well, each reported separately in ``details``.
    """
    n1, n2, n3 = (int(d) for d in dims)
    orders = [("123", (n1, n2, n3))]
    if full_set:
        orders += [("231", (n2, n3, n1)), ("312", (n3, n1, n2))]
    per_eq = {}
    worst = Residual(0.0, 0.0)
    for name, (a, b, c) in orders:
        try:
            fa, fb = families[(a, b)], families[(b, c)]
        except KeyError as exc:
            raise DimensionError(f"no family supplied for site pair {exc.args[0]}") from exc
        _check_dim(as_cmatrix(fa(0.0)), a * b, f"family {(a, b)}")
        _check_dim(as_cmatrix(fb(0.0)), b * c, f"family {(b, c)}")
        res = spectral_residual(fa, fb, (a, b, c), 0, 1, u, v)
        per_eq[name] = {"max_abs_residual": res.max_abs, "frobenius_residual": res.frobenius}
        worst = Residual(max(worst.max_abs, res.max_abs), max(worst.frobenius, res.frobenius))
    tol = default_tolerance(n1 * n2 * n3) if tol is None else tol
    for entry in per_eq.values():
        entry["pass"] = entry["max_abs_residual"] <= tol
    eq_id = f"inhomogeneous dims={[n1, n2, n3]}" + (" full-set" if full_set else "")
    return _report(eq_id, worst, tol, draws=[(u, v)], equations=per_eq)


def relativistic_difference(ubar, vbar):
    denom = 1 - ubar * vbar
    if abs(denom) <= 1e-9:
        raise SingularParameterError(f"1 - ubar*vbar = {denom} is at the pole")
    return (ubar - vbar) / denom


def verify_second_kind(
    family: Family, ubar, vbar, d: int = 2, tol: Optional[float] = None
) -> VerificationReport:
    """YBE with velocities composed as ``(ubar - vbar) / (1 - ubar vbar)``."""
    w = relativistic_difference(ubar, vbar)
    dims = (d, d, d)
    a = lambda x: embed_operator(family(x), dims, 0)
    b = lambda x: embed_operator(family(x), dims, 1)
    res = triple_residual(a(w), b(ubar), a(vbar), b(vbar), a(ubar), b(w))
    tol = default_tolerance(d**3) if tol is None else tol
    return _report("second-kind", res, tol, draws=[(ubar, vbar)])


def verify_factorized(
    family: Family, fbar: Callable[[complex], complex], u, v, tol: Optional[float] = None
) -> VerificationReport:
    """Factorized relation ``R(v) R(u - v) = F(u, v) R(u)`` with
    ``F(u, v) = Fbar(u - v) Fbar(v) / Fbar(u)``.

    ``family`` is the full matrix including its ``Fbar`` prefactor.
    """
    fu = fbar(u)
    if abs(fu) < 1e-300:
        raise SingularParameterError("Fbar(u) vanishes")
    scale = fbar(u - v) * fbar(v) / fu
    res = residual_norm(family(v) @ family(u - v), scale * family(u))
    n = as_cmatrix(family(0.0)).shape[0]
    tol = default_tolerance(n) if tol is None else tol
    return _report("factorized", res, tol, draws=[(u, v)])


def generic_unitary_factor(r) -> float:
    """Positive scale making ``r r^dagger`` have unit mean diagonal."""
    r = as_cmatrix(r, square=True)
    mean = float(np.real(np.trace(r @ dagger(r)))) / r.shape[0]
    if mean <= 0:
        raise SingularParameterError("matrix has zero norm")
    return 1.0 / np.sqrt(mean)


def verify_unitary(
    r, normalize: bool = False, factor: Optional[complex] = None, tol: float = DEFAULT_TOL
) -> VerificationReport:
    """Unitarity defect ``|| s r (s r)^dagger - I ||`` for an optional scale ``s``."""
    r = as_cmatrix(r, square=True)
    if not np.any(r):
        raise SingularParameterError("matrix has zero norm")
    s = 1.0
    if normalize:
        s = generic_unitary_factor(r) if factor is None else factor
    m = s * r
    res = residual_norm(m @ dagger(m), identity(r.shape[0]))
    return _report("unitary", res, tol, factor=_jsonable(s))


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("GYBE_FORGE_THREADS", "1")))
    except ValueError:
        return 1


def draw_pairs(n_samples: int, seed: int, complex_draws: bool = False) -> list[tuple]:
    """Deterministic ``(u, v)`` draws, uniform on ``[-1, 1]^2`` (per real/imag part)."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(-1.0, 1.0, size=(n_samples, 2))
    if not complex_draws:
        return [(float(a), float(b)) for a, b in re]
    im = rng.uniform(-1.0, 1.0, size=(n_samples, 2))
    return [(complex(a, c), complex(b, d)) for (a, b), (c, d) in zip(re, im)]


def sweep(
    check: Callable[[complex, complex], VerificationReport],
    n_samples: int,
    seed: int,
    tol: Optional[float] = None,
    equation_id: Optional[str] = None,
    complex_draws: bool = False,
    draws: Optional[Sequence[tuple]] = None,
) -> VerificationReport:
    """Run ``check(u, v)`` over seeded draws and keep the worst residuals.

    ``draws`` overrides the sampled points (used when the domain differs from
    the unit square, e.g. velocities away from a pole).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    points = list(draws) if draws is not None else draw_pairs(n_samples, seed, complex_draws)
    threads = min(_thread_cap(), len(points))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda p: check(*p), points))
    else:
        reports = [check(*p) for p in points]
    worst = max(reports, key=lambda r: r.max_abs_residual)
    out = VerificationReport(
        equation_id=equation_id or worst.equation_id,
        samples=len(points),
        max_abs_residual=max(r.max_abs_residual for r in reports),
        frobenius_residual=max(r.frobenius_residual for r in reports),
        tolerance=worst.tolerance if tol is None else tol,
        seed=seed,
        draws=[list(p) for p in points],
    )
    if "equations" in worst.details:
        merged = {}
        for rep in reports:
            for name, entry in rep.details["equations"].items():
                cur = merged.setdefault(name, {"max_abs_residual": 0.0, "frobenius_residual": 0.0})
                cur["max_abs_residual"] = max(cur["max_abs_residual"], entry["max_abs_residual"])
                cur["frobenius_residual"] = max(cur["frobenius_residual"], entry["frobenius_residual"])
        for entry in merged.values():
            entry["pass"] = entry["max_abs_residual"] <= out.tolerance
        out.details["equations"] = merged
    return out


def verify_induced(
    induced: Family, r22: Family, n_aux: int, u, v, tol: Optional[float] = None
) -> VerificationReport:
    """Braid relation between ``R22 ⊗ D`` on ``(V2 ⊗ V2) ⊗ V_aux`` and ``R22`` on the next pair.

    The chain is ``V2 ⊗ V2 ⊗ V2 ⊗ V_aux``; the induced operator acts on
    sites 0, 1 and the auxiliary factor, the plain one on sites 1, 2.
    """
    def a(x):
        m = as_cmatrix(induced(x), square=True)
        _check_dim(m, 4 * n_aux, "induced operator")
        t = m.reshape(4, n_aux, 4, n_aux)
        eye2 = identity(2)
        # insert the idle third qubit between the pair and the auxiliary space
        full = np.einsum("aibj,cd->acibdj", t, eye2)
        return full.reshape(8 * n_aux, 8 * n_aux)

    def b(x):
        return np.kron(embed_operator(r22(x), (2, 2, 2), 1), identity(n_aux))

    w = u - v
    res = triple_residual(a(w), b(u), a(v), b(v), a(u), b(w))
    tol = default_tolerance(8 * n_aux) if tol is None else tol
    return _report("induced", res, tol, draws=[(u, v)])
