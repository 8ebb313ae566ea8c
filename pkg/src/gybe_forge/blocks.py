"""Small spectral-parameter blocks (4x4, 2x2, 1x1) used to build large solutions.

Every builder is normalized so that ``B(0) = I``; overall exponential
prefactors are explicit parameters.  Rates and deformation constants accept
complex values.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Sequence, Union

import numpy as np

from .errors import GybeError, SingularParameterError
from .tensor import CDTYPE

Scalar = Union[int, float, complex]

# (t, t1, t2) sign configurations for which the hyperbolic block solves YBE.
TRIG_SIGN_CONFIGS = ((1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1))


@dataclass(frozen=True)
class TrigBlockParams:
    gamma: Scalar = 1.0
    beta: Scalar = 1.0
    q: Scalar = 1.0
    t: int = 1
    t1: int = -1
    t2: int = -1

    def __post_init__(self):
        if self.q == 0:
            raise SingularParameterError("q must be nonzero")
        for s in (self.t, self.t1, self.t2):
            if s not in (1, -1):
                raise GybeError(f"sign parameters must be +1 or -1, got {s}")

    @property
    def signs(self) -> tuple[int, int, int]:
        return (self.t, self.t1, self.t2)

    def is_ybe_valid(self, atol: float = 1e-12) -> bool:
        """Whether the parameters lie in a YBE-solving configuration.

        With ``t2 = +1`` the two rates must agree up to sign.
        """
        if self.signs not in TRIG_SIGN_CONFIGS:
            return False
        if self.t2 == 1:
            return abs(self.gamma - self.beta) < atol or abs(self.gamma + self.beta) < atol
        return True


@dataclass(frozen=True)
class RotBlockParams:
    """Trigonometric (cos/sin) 4x4 block with two rates and two deformations."""

    theta: Scalar = 1.0
    epsilon: Scalar = 1.0
    q: Scalar = 1.0
    t: Scalar = 1.0

    def __post_init__(self):
        if self.q == 0 or self.t == 0:
            raise SingularParameterError("q and t must be nonzero")


@dataclass(frozen=True)
class XxzBlockParams:
    u0: Scalar = 1.0
    gamma: Scalar = 0.0
    variant: str = "plus"
    a: Scalar = 1.0
    overall_alpha: Scalar = 0.0

    def __post_init__(self):
        if self.variant not in ("plus", "minus"):
            raise GybeError(f"variant must be 'plus' or 'minus', got {self.variant!r}")
        if abs(np.sinh(self.u0)) < 1e-14:
            raise SingularParameterError("sinh(u0) vanishes")


@dataclass(frozen=True)
class DeformedBlockParams:
    alpha0: Scalar = 1.0
    alphax: Scalar = 1.0
    q: Scalar = 1.0
    t: Scalar = 1.0

    def __post_init__(self):
        if self.q == 0 or self.t == 0:
            raise SingularParameterError("q and t must be nonzero")

    def is_ybe_valid(self, atol: float = 1e-12) -> bool:
        """Homogeneous YBE holds for any rates and ``q`` once ``t = ±1``."""
        return abs(self.t - 1) < atol or abs(self.t + 1) < atol

    def partner(self, qprime: Scalar) -> "DeformedBlockParams":
        """Companion block for the mixed-constant equation: rates swapped, (q', q/(q' t))."""
        if qprime == 0:
            raise SingularParameterError("q' must be nonzero")
        return DeformedBlockParams(self.alphax, self.alpha0, qprime, self.q / (qprime * self.t))


@dataclass(frozen=True)
class DiagBlockParams:
    thetas: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.thetas) != 4:
            raise GybeError("diagonal block needs exactly four rates")
        object.__setattr__(self, "thetas", tuple(self.thetas))


@dataclass(frozen=True)
class OddBlockParams:
    theta: Scalar = 1.0
    p: Scalar = 1.0
    alpha: Scalar = 0.0

    def __post_init__(self):
        if self.p == 0:
            raise SingularParameterError("p must be nonzero")


def build_trig_block(params: TrigBlockParams, u: Scalar) -> np.ndarray:
    g, b, q = params.gamma * u, params.beta * u, params.q
    ch_g, ch_b, sh_g, sh_b = np.cosh(g), np.cosh(b), np.sinh(g), np.sinh(b)
    m = np.zeros((4, 4), dtype=CDTYPE)
    m[0, 0] = m[3, 3] = ch_g
    m[1, 1] = m[2, 2] = ch_b
    m[0, 3] = q * sh_b
    m[1, 2] = params.t * sh_g
    m[2, 1] = params.t1 * sh_g
    m[3, 0] = params.t2 / q * sh_b
    return m


def build_rot_block(params: RotBlockParams, u: Scalar) -> np.ndarray:
    a, e = params.theta * u, params.epsilon * u
    m = np.zeros((4, 4), dtype=CDTYPE)
    m[0, 0] = m[3, 3] = np.cos(a)
    m[1, 1] = m[2, 2] = np.cos(e)
    m[0, 3] = params.q * np.sin(a)
    m[3, 0] = -np.sin(a) / params.q
    m[1, 2] = params.t * np.sin(e)
    m[2, 1] = -np.sin(e) / params.t
    return m


def build_diag_block(thetas: Sequence[Scalar], u: Scalar) -> np.ndarray:
    if len(thetas) != 4:
        raise GybeError("diagonal block needs exactly four rates")
    return np.diag(np.exp(np.asarray(thetas, dtype=CDTYPE) * u))


def xxz_matrix(x: Scalar, u0: Scalar, gamma: Scalar, variant: str) -> np.ndarray:
    """The bare XXZ-type check matrix at argument ``x``."""
    s0 = np.sinh(u0)
    if abs(s0) < 1e-14:
        raise SingularParameterError("sinh(u0) vanishes")
    sign = 1 if variant == "plus" else -1
    m = np.zeros((4, 4), dtype=CDTYPE)
    m[0, 0] = np.sinh(x + u0) / s0
    m[1, 1] = m[2, 2] = 1.0
    m[1, 2] = np.exp(gamma) * np.sinh(x) / s0
    m[2, 1] = np.exp(-gamma) * np.sinh(x) / s0
    m[3, 3] = np.sinh(u0 + sign * x) / s0
    return m


def build_xxz_block(params: XxzBlockParams, u: Scalar) -> np.ndarray:
    return np.exp(params.overall_alpha * u) * xxz_matrix(
        params.a * u, params.u0, params.gamma, params.variant
    )


def build_deformed_block(params: DeformedBlockParams, u: Scalar) -> np.ndarray:
    a0, ax = params.alpha0 * u, params.alphax * u
    q, t = params.q, params.t
    m = np.zeros((4, 4), dtype=CDTYPE)
    m[0, 0] = m[3, 3] = np.cosh(a0)
    m[1, 1] = m[2, 2] = np.cosh(ax)
    m[0, 3] = q * np.sinh(ax)
    m[3, 0] = -np.sinh(ax) / q
    m[1, 2] = t * np.sinh(a0)
    m[2, 1] = -np.sinh(a0) / t
    return m


def build_odd_blocks(params: OddBlockParams, u: Scalar) -> tuple[np.ndarray, np.ndarray]:
    """Return the (1x1, 2x2) blocks of the odd-dimensional central sector."""
    scalar = np.array([[np.exp(params.alpha * u)]], dtype=CDTYPE)
    a, p = params.theta * u, params.p
    vec = np.array([[np.cos(a), p * np.sin(a)], [-np.sin(a) / p, np.cos(a)]], dtype=CDTYPE)
    return scalar, vec


def bell_generator(q: Scalar = 1.0, t: Scalar = 1.0) -> np.ndarray:
    m = np.zeros((4, 4), dtype=CDTYPE)
    m[0, 3] = q
    m[3, 0] = -1.0 / q
    m[1, 2] = t
    m[2, 1] = -1.0 / t
    return m


def build_bell_second_kind(ubar: Scalar, phi: float = 0.0, t: int = 1) -> np.ndarray:
    """``(I + ubar M) / sqrt(1 + ubar^2)`` with ``q = exp(i phi)``.

    This is the cos/sin block at equal rates divided by its cosine, written in
    the velocity ``ubar = tan(theta u)``.
    """
    if t not in (1, -1):
        raise GybeError("the velocity form needs t = +1 or -1")
    denom = np.sqrt(1 + ubar * ubar)
    if abs(denom) < 1e-14:
        raise SingularParameterError("1 + ubar^2 vanishes")
    return (np.eye(4, dtype=CDTYPE) + ubar * bell_generator(np.exp(1j * phi), t)) / denom


# -- JSON round trip -----------------------------------------------------------

_KINDS = {
    "trig": TrigBlockParams,
    "rot": RotBlockParams,
    "xxz": XxzBlockParams,
    "deformed": DeformedBlockParams,
    "diag": DiagBlockParams,
    "odd": OddBlockParams,
}


def _decode_scalar(v: Any):
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) for x in v
    ):
        return complex(v[0], v[1])
    return v


def _encode_scalar(v: Any):
    if isinstance(v, complex):
        if v.imag == 0:
            return v.real
        return {"re": v.real, "im": v.imag}
    if isinstance(v, tuple):
        return [_encode_scalar(x) for x in v]
    return v


@dataclass
class BlockSpec:
    """A block kind plus its parameters; what the JSON files carry."""

    kind: str
    params: Any = field(default=None)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GybeError(f"unknown block kind {self.kind!r}; expected one of {sorted(_KINDS)}")
        if self.params is None:
            self.params = _KINDS[self.kind]()

    def build(self, u: Scalar):
        """Matrix of this block at ``u``; odd blocks return the 2x2 part."""
        p = self.params
        if self.kind == "trig":
            return build_trig_block(p, u)
        if self.kind == "rot":
            return build_rot_block(p, u)
        if self.kind == "xxz":
            return build_xxz_block(p, u)
        if self.kind == "deformed":
            return build_deformed_block(p, u)
        if self.kind == "diag":
            return build_diag_block(p.thetas, u)
        return build_odd_blocks(p, u)[1]

    def build_scalar(self, u: Scalar) -> np.ndarray:
        if self.kind != "odd":
            raise GybeError("only odd blocks carry a scalar part")
        return build_odd_blocks(self.params, u)[0]

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        out.update({k: _encode_scalar(v) for k, v in asdict(self.params).items()})
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BlockSpec":
        obj = dict(obj)
        try:
            kind = obj.pop("kind")
        except KeyError as exc:
            raise GybeError("block object needs a 'kind' field") from exc
        if kind not in _KINDS:
            raise GybeError(f"unknown block kind {kind!r}; expected one of {sorted(_KINDS)}")
        decoded = {k: _decode_scalar(v) for k, v in obj.items()}
        if kind == "diag" and "thetas" in decoded:
            decoded["thetas"] = tuple(_decode_scalar(x) for x in decoded["thetas"])
        try:
            params = _KINDS[kind](**decoded)
        except TypeError as exc:
            raise GybeError(f"bad parameters for block kind {kind!r}: {exc}") from exc
        return cls(kind, params)
