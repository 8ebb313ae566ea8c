"""Registry of named solution families, their parameters and certified equations.

Every family maps a parameter dict to a matrix-valued function of ``u`` with
``F(0) = I``.  Certificates name the equations the family is known to solve;
:func:`certify` evaluates one of them at a given ``(u, v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np

from . import blocks as bl
from .errors import DimensionError, GybeError, UnknownFamilyError
from .gates import unitarize
from .permutations import build_r16, build_r22_two_parameter, build_r44, build_r2222, symmetric_parity
from .verify import (
    GybeShape,
    VerificationReport,
    draw_pairs,
    sweep,
    verify_factorized,
    verify_induced,
    verify_inhomogeneous,
    verify_second_kind,
    verify_spectral,
)
from .xshape import (
    BlockMap,
    mixed_block_map,
    assemble_x_shaped,
    build_m_family,
    build_p_block_general,
)


@dataclass(frozen=True)
class Certificate:
    """One equation a family satisfies.

    ``kind`` is ``spectral`` (``shape = (d, k, p)``), ``inhomogeneous``
    (``shape = dims``), ``factorized``, ``second-kind`` or ``induced``.
    """

    kind: str
    shape: tuple = ()
    full_set: bool = False

    def label(self) -> str:
        if self.kind == "spectral":
            return "gybe-" + "-".join(map(str, self.shape))
        if self.kind == "inhomogeneous":
            return "inhomogeneous-" + "-".join(map(str, self.shape)) + ("-full" if self.full_set else "")
        return self.kind

    def to_json(self) -> dict:
        return {"kind": self.kind, "shape": list(self.shape), "full_set": self.full_set}


@dataclass
class Built:
    """A constructed family: the primary matrix function plus any partners."""

    matrix: Callable
    pairs: dict = field(default_factory=dict)
    fbar: Optional[Callable] = None
    r22: Optional[Callable] = None
    n_aux: int = 0
    certificates: tuple = ()


@dataclass(frozen=True)
class FamilyDef:
    id: str
    summary: str
    defaults: Mapping
    make: Callable[[dict], Built]

    def build(self, params: Optional[Mapping] = None) -> Built:
        merged = dict(self.defaults)
        merged.update({k: _decode(v) for k, v in (params or {}).items()})
        return self.make(merged)


def _decode(v):
    """Turn ``{"re", "im"}`` dicts (at any depth of lists) into complex numbers."""
    if isinstance(v, dict) and v and set(v) <= {"re", "im"}:
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def _cell(obj) -> bl.BlockSpec:
    return obj if isinstance(obj, bl.BlockSpec) else bl.BlockSpec.from_json(obj)


def _gamma_rates(raw) -> dict:
    out = {}
    for key, rate in (raw or {}).items():
        n, m = (int(x) for x in str(key).split(","))
        out[(n, m)] = _decode(rate)
    return out


# -- constructors -------------------------------------------------------------------


def _trig(p):
    par = bl.TrigBlockParams(p["gamma"], p["beta"], p["q"], p["t"], p["t1"], p["t2"])
    if not par.is_ybe_valid():
        raise GybeError(f"signs {par.signs} with gamma={par.gamma}, beta={par.beta} do not solve YBE")
    return Built(lambda u: bl.build_trig_block(par, u), certificates=(Certificate("spectral", (2, 2, 1)),))


def _rot(p):
    par = bl.RotBlockParams(p["theta"], p["epsilon"], p["q"], p["t"])
    rate = p["fbar_rate"]
    fbar = lambda u: np.exp(1j * rate * u)
    return Built(
        lambda u: fbar(u) * bl.build_rot_block(par, u),
        fbar=fbar,
        certificates=(Certificate("factorized"),),
    )


def _diag(p):
    thetas = tuple(_decode(x) for x in p["thetas"])
    rate = p["fbar_rate"]
    fbar = lambda u: np.exp(1j * rate * u)
    return Built(
        lambda u: fbar(u) * bl.build_diag_block(thetas, u),
        fbar=fbar,
        certificates=(Certificate("spectral", (2, 2, 1)), Certificate("factorized")),
    )


def _xxz(p):
    par = bl.XxzBlockParams(p["u0"], p["gamma"], p["variant"], p["a"], p["overall_alpha"])
    return Built(lambda u: bl.build_xxz_block(par, u), certificates=(Certificate("spectral", (2, 2, 1)),))


def _deformed(p):
    par = bl.DeformedBlockParams(p["alpha0"], p["alphax"], p["q"], p["t"])
    if not par.is_ybe_valid():
        raise GybeError("the deformed block solves the homogeneous equation only for t = +1 or -1")
    return Built(lambda u: bl.build_deformed_block(par, u), certificates=(Certificate("spectral", (2, 2, 1)),))


def _bell(p):
    phi, t = float(p["phi"]), int(p["t"])
    return Built(
        lambda ub: bl.build_bell_second_kind(ub, phi, t), certificates=(Certificate("second-kind"),)
    )


def _gate(p):
    g, b, a = float(p["gamma"]), float(p["beta"]), float(p["alpha_phase"])
    return Built(lambda u: unitarize(g, b, u, a)[0], certificates=(Certificate("spectral", (2, 2, 1)),))


def _m_matrix(p):
    dim = int(p["dim"])
    k = int(round(math.log2(dim))) if dim > 0 else 0
    certs = (Certificate("spectral", (2, k, 1)),) if 2**k == dim and k >= 2 else ()
    build_m_family(dim)  # validates the dimension
    return Built(lambda u: build_m_family(dim, u).r, certificates=certs)


def _uniform(n1, n2, cell, odd, gamma):
    bm = BlockMap.uniform(n1, n2, cell, odd)
    bm.gamma.update({pair: g for pair, g in gamma.items() if pair in bm.required_pairs()})
    return lambda u: assemble_x_shaped(bm, u)


def _x_shaped(p):
    n1, n2 = int(p["n1"]), int(p["n2"])
    cell = _cell(p["cell"])
    odd = _cell(p["odd_cell"]) if p.get("odd_cell") else None
    gamma = _gamma_rates(p.get("gamma_rates"))
    flip = {(m, n): g for (n, m), g in gamma.items()}
    pairs = {
        (n1, n2): _uniform(n1, n2, cell, odd, gamma),
        (n2, n1): _uniform(n2, n1, cell, odd, flip),
        (n1, n1): _uniform(n1, n1, cell, odd, {}),
        (n2, n2): _uniform(n2, n2, cell, odd, {}),
    }
    certs = [Certificate("inhomogeneous", (n1, n2, n1), full_set=True)]
    if n1 == n2 and not gamma:
        certs.insert(0, Certificate("spectral", (n1, 2, 1)))
    return Built(pairs[(n1, n2)], pairs=pairs, certificates=tuple(certs))


def _x_shaped_odd(p):
    n = int(p["n"])
    if n % 2 == 0:
        raise DimensionError("the central-sector family needs an odd site dimension")
    q = complex(p["q"])
    rate = p["rate"]
    pp = p.get("p") or complex(np.sqrt(-q))
    cell = bl.BlockSpec("trig", bl.TrigBlockParams(rate, rate, q, 1, 1, 1))
    odd = bl.BlockSpec("odd", bl.OddBlockParams(p["theta"], pp, p["alpha"]))
    f = _uniform(n, n, cell, odd, {})
    return Built(f, certificates=(Certificate("spectral", (n, 2, 1)),))


def _induced(p):
    seed = bl.TrigBlockParams(p["gamma"], p["beta"], p["q"], 1, -1, -1)
    n_aux = int(p["n1"]) * int(p["n2"])
    phases = p.get("phases")
    if phases is not None and len(phases) != n_aux:
        raise DimensionError(f"need {n_aux} phases, got {len(phases)}")
    r22 = lambda u: bl.build_trig_block(seed, u)
    if phases is None:
        mat = lambda u: np.kron(r22(u), np.eye(n_aux))
    else:
        ph = np.asarray(phases, dtype=float)
        mat = lambda u: np.kron(r22(u), np.diag(np.exp(1j * ph * u)))
    return Built(mat, r22=r22, n_aux=n_aux, certificates=(Certificate("induced"),))


def _mixed_trig(p):
    params = {"alphas": p["alphas"], "alpha": p["alpha"], "q": p["q"], "t": p["t"]}
    bm24 = mixed_block_map("trig24", params)
    bm42 = mixed_block_map("trig42", params)
    pairs = {(2, 4): lambda u: assemble_x_shaped(bm24, u), (4, 2): lambda u: assemble_x_shaped(bm42, u)}
    return Built(
        pairs[(2, 4)],
        pairs=pairs,
        certificates=(Certificate("inhomogeneous", (2, 4, 2)), Certificate("inhomogeneous", (4, 2, 4))),
    )


def _mixed_xxz(p):
    keys = ("variant", "u0", "ux", "a0", "ax", "gamma", "beta", "alpha")
    params = {k: p[k] for k in keys}
    bm24 = mixed_block_map("xxz24", params)
    bm42 = mixed_block_map("xxz42", params)
    seed = bl.XxzBlockParams(p["u0"], p["gamma"], p["variant"])
    pairs = {
        (2, 4): lambda u: assemble_x_shaped(bm24, u),
        (4, 2): lambda u: assemble_x_shaped(bm42, u),
        (2, 2): lambda u: bl.build_xxz_block(seed, u),
    }
    return Built(
        pairs[(2, 4)],
        pairs=pairs,
        certificates=(
            Certificate("inhomogeneous", (2, 2, 4)),
            Certificate("inhomogeneous", (2, 4, 2), full_set=True),
            Certificate("inhomogeneous", (4, 2, 4)),
        ),
    )


def _p_block(p):
    pc, n, k = int(p["p"]), int(p["N"]), int(p["K"])
    cell = _cell(p["cell"])
    if cell.build(0.0).shape != (pc * pc, pc * pc):
        raise DimensionError(f"cell must be {pc * pc}x{pc * pc}")
    cells = {(i, j): cell.build for i in range(1, n + 1) for j in range(1, k + 1)}
    f = lambda u: build_p_block_general(pc, n, k, cells, u)
    certs = (Certificate("spectral", (pc * n, 2, 1)),) if n == k else ()
    return Built(f, certificates=certs)


def _perm_n2(p):
    a, ap = p["rate"], p["rate_prime"]
    return Built(
        lambda u: build_r22_two_parameter(a * u, ap * u), certificates=(Certificate("spectral", (2, 2, 1)),)
    )


def _perm16(p):
    alphas = tuple(p["alphas"])
    parity = symmetric_parity(*p["free_bits"])
    return Built(lambda u: build_r16(alphas, u, parity), certificates=(Certificate("spectral", (4, 2, 1)),))


def _r44(p):
    eps = tuple(_decode(e) for e in p["eps"])
    return Built(lambda u: build_r44(u, eps), certificates=(Certificate("spectral", (4, 2, 1)),))


def _r2222(p):
    s = (int(p["sx"]), int(p["sy"]), int(p["sz"]))
    return Built(lambda u: build_r2222(u, *s), certificates=(Certificate("spectral", (2, 4, 1)),))


_TRIG_CELL = {"kind": "trig", "gamma": 0.6, "beta": 0.9, "q": 1.3, "t": 1, "t1": -1, "t2": -1}

REGISTRY: dict[str, FamilyDef] = {
    f.id: f
    for f in (
        FamilyDef(
            "trig-block",
            "two-rate hyperbolic 4x4 block",
            {"gamma": 0.6, "beta": 0.9, "q": 1.3, "t": 1, "t1": -1, "t2": -1},
            _trig,
        ),
        FamilyDef(
            "rot-block",
            "cos/sin 4x4 block with exp(i rate u) prefactor",
            {"theta": 0.7, "epsilon": 0.4, "q": 1.3, "t": 0.8, "fbar_rate": 0.5},
            _rot,
        ),
        FamilyDef(
            "diag-block",
            "diagonal exponential 4x4 block",
            {"thetas": [0.3, -0.5, 0.8, 0.1], "fbar_rate": 0.2},
            _diag,
        ),
        FamilyDef(
            "xxz-block",
            "XXZ-type 4x4 block",
            {"u0": 0.8, "gamma": 0.3, "variant": "plus", "a": 1.0, "overall_alpha": 0.0},
            _xxz,
        ),
        FamilyDef(
            "deformed-block",
            "two-rate block with deformations q, t (t = +1 or -1)",
            {"alpha0": 0.7, "alphax": 0.3, "q": 1.5, "t": 1},
            _deformed,
        ),
        FamilyDef(
            "bell-second-kind",
            "velocity-parametrized Bell matrix",
            {"phi": 0.3, "t": 1},
            _bell,
        ),
        FamilyDef(
            "unitary-gate",
            "normalized two-rate gate with phase q = exp(i alpha)",
            {"gamma": 0.6, "beta": 0.9, "alpha_phase": 0.4},
            _gate,
        ),
        FamilyDef("m-matrix", "cosh(u) I + sinh(u) M", {"dim": 4}, _m_matrix),
        FamilyDef(
            "x-shaped",
            "X-shaped matrix on V_n1 ⊗ V_n2 from identical cells",
            {"n1": 2, "n2": 4, "cell": _TRIG_CELL, "odd_cell": None, "gamma_rates": None},
            _x_shaped,
        ),
        FamilyDef(
            "x-shaped-odd",
            "odd-dimensional X-shaped matrix with a central sector",
            {"n": 3, "q": 1.0, "rate": 0.8, "theta": 0.5, "alpha": 0.37, "p": None},
            _x_shaped_odd,
        ),
        FamilyDef(
            "induced",
            "R22 ⊗ I (or a diagonal phase operator) on an auxiliary space",
            {"gamma": 0.6, "beta": 0.9, "q": 1.3, "n1": 2, "n2": 2, "phases": None},
            _induced,
        ),
        FamilyDef(
            "mixed-trig",
            "8x8 two-rate matrices on V2 ⊗ V4 and V4 ⊗ V2",
            {"alphas": [0.7, -0.4, 0.7, -0.4], "alpha": 0.35, "q": 1.0, "t": 1.0},
            _mixed_trig,
        ),
        FamilyDef(
            "mixed-xxz",
            "8x8 XXZ-type matrices on V2 ⊗ V4 and V4 ⊗ V2",
            {
                "variant": "plus",
                "u0": 0.8,
                "ux": 0.8,
                "a0": 1.0,
                "ax": 1.0,
                "gamma": 0.3,
                "beta": -0.2,
                "alpha": 0.4,
            },
            _mixed_xxz,
        ),
        FamilyDef(
            "p-block",
            "(pN)^2 x (pK)^2 matrix from p^2 x p^2 cells",
            {"p": 2, "N": 2, "K": 2, "cell": _TRIG_CELL},
            _p_block,
        ),
        FamilyDef(
            "perm-n2",
            "N=2 graded permutation sum with two rates",
            {"rate": 0.8, "rate_prime": -0.5},
            _perm_n2,
        ),
        FamilyDef(
            "perm-16",
            "four-color N=4 graded permutation superposition",
            {"alphas": [1, 1, 1, 1], "free_bits": [1, 1, 0]},
            _perm16,
        ),
        FamilyDef("r44", "16x16 Pauli-product family", {"eps": [1, 1, 1]}, _r44),
        FamilyDef("r2222", "four-qubit family for the (2,4,1) equation", {"sx": 1, "sy": 1, "sz": 1}, _r2222),
    )
}


def get_family(fid: str) -> FamilyDef:
    try:
        return REGISTRY[fid]
    except KeyError as exc:
        raise UnknownFamilyError(
            f"unknown family {fid!r}; registered families: {', '.join(sorted(REGISTRY))}"
        ) from exc


def build_family(fid: str, params: Optional[Mapping] = None) -> Built:
    return get_family(fid).build(params)


def find_certificate(built: Built, label: Optional[str]) -> Certificate:
    if not built.certificates:
        raise GybeError("this family has no certified equation for these parameters")
    if label is None:
        return built.certificates[0]
    for cert in built.certificates:
        if cert.label() == label:
            return cert
    raise GybeError(
        f"no certificate {label!r}; available: {', '.join(c.label() for c in built.certificates)}"
    )


def certificate_for_shape(built: Built, shape: Optional[tuple], dims: Optional[tuple]) -> Certificate:
    """Pick the certificate matching a requested ``(d, k, p)`` shape or dims, else the first."""
    if shape is not None:
        return Certificate("spectral", tuple(shape))
    if dims is not None:
        for c in built.certificates:
            if c.kind == "inhomogeneous" and c.shape == tuple(dims):
                return c
        return Certificate("inhomogeneous", tuple(dims))
    return find_certificate(built, None)


def certify(built: Built, cert: Certificate, u, v, tol: Optional[float] = None) -> VerificationReport:
    if cert.kind == "spectral":
        return verify_spectral(built.matrix, GybeShape.dkp(*cert.shape), u, v, tol=tol)
    if cert.kind == "inhomogeneous":
        pairs = built.pairs or {}
        return verify_inhomogeneous(pairs, cert.shape, u, v, full_set=cert.full_set, tol=tol)
    if cert.kind == "factorized":
        return verify_factorized(built.matrix, built.fbar or (lambda _: 1.0), u, v, tol=tol)
    if cert.kind == "second-kind":
        return verify_second_kind(built.matrix, u, v, tol=tol)
    if cert.kind == "induced":
        return verify_induced(built.matrix, built.r22, built.n_aux, u, v, tol=tol)
    raise GybeError(f"unknown certificate kind {cert.kind!r}")


def sweep_family(
    built: Built,
    cert: Certificate,
    n_samples: int,
    seed: int,
    tol: Optional[float] = None,
    complex_draws: bool = False,
) -> VerificationReport:
    draws = None
    if cert.kind == "second-kind":
        # velocities stay inside (-0.9, 0.9) so 1 - ubar vbar stays away from zero
        draws = [(0.9 * a, 0.9 * b) for a, b in draw_pairs(n_samples, seed)]
    return sweep(
        lambda u, v: certify(built, cert, u, v, tol),
        n_samples,
        seed,
        tol=tol,
        equation_id=cert.label(),
        complex_draws=complex_draws,
        draws=draws,
    )


def registry_listing() -> list[dict]:
    out = []
    for fid in sorted(REGISTRY):
        f = REGISTRY[fid]
        built = f.build()
        out.append(
            {
                "id": fid,
                "summary": f.summary,
                "defaults": _jsonable(dict(f.defaults)),
                "certified": [c.to_json() for c in built.certificates],
            }
        )
    return out


def _jsonable(x: Any):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x
