"""X-shaped check matrices assembled from small blocks.

A site of dimension ``N`` carries signed labels ``𝒩, ..., 1, -1, ..., -𝒩``
(even ``N``) or ``𝒩, ..., 0, ..., -𝒩`` (odd ``N``).  The check matrix on
``V_N1 ⊗ V_N2`` only mixes states whose labels agree up to sign, so it splits
into one cell per pair of label magnitudes ``(n, m)``:

* ``n, m > 0``: a 4x4 block on ``(+n,+m), (+n,-m), (-n,+m), (-n,-m)``
* one of them zero: a 2x2 block on the two signed partners
* ``(0, 0)``: a single diagonal entry (both dimensions odd)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .blocks import (
    BlockSpec,
    DeformedBlockParams,
    XxzBlockParams,
    build_deformed_block,
    build_xxz_block,
)
from .errors import (
    DimensionError,
    IncompleteBlockMapError,
    InvalidPatternError,
    UnsupportedDimensionError,
)
from .tensor import CDTYPE, identity

Cell = Union[BlockSpec, Callable[[complex], np.ndarray]]


@dataclass(frozen=True)
class LabelMap:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise DimensionError("site dimension must be positive")

    @property
    def half(self) -> int:
        return self.N // 2

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    @property
    def labels(self) -> list[int]:
        h = self.half
        top = list(range(h, 0, -1))
        return top + ([0] if self.odd else []) + [-x for x in reversed(top)]

    @property
    def magnitudes(self) -> list[int]:
        """Nonnegative label magnitudes, ascending (0 first for odd sites)."""
        return ([0] if self.odd else []) + list(range(1, self.half + 1))

    def index(self, label: int) -> int:
        h = self.half
        if label == 0:
            if not self.odd:
                raise DimensionError(f"label 0 does not exist for even N={self.N}")
            return h
        if not 1 <= abs(label) <= h:
            raise DimensionError(f"label {label} out of range for N={self.N}")
        if label > 0:
            return h - label
        return self.N - 1 - (h + label)

    def partners(self, magnitude: int) -> list[int]:
        """Signed labels of one magnitude, highest first."""
        return [0] if magnitude == 0 else [magnitude, -magnitude]


def vertex_count(n1: int, n2: int) -> int:
    if n1 < 1 or n2 < 1:
        raise DimensionError("dimensions must be positive")
    return 2 * n1 * n2 - (1 if n1 % 2 and n2 % 2 else 0)


def cell_states(lm1: LabelMap, lm2: LabelMap, pair: tuple[int, int]) -> list[int]:
    """Flat indices of the states one cell acts on, in block order."""
    n, m = pair
    if n < 0 or m < 0:
        raise DimensionError("cells are keyed by nonnegative magnitudes")
    return [
        lm1.index(a) * lm2.N + lm2.index(b) for a in lm1.partners(n) for b in lm2.partners(m)
    ]


def cell_size(pair: tuple[int, int]) -> int:
    return (1 if pair[0] == 0 else 2) * (1 if pair[1] == 0 else 2)


@dataclass
class BlockMap:
    """Cells of an X-shaped matrix on ``V_N1 ⊗ V_N2``.

    Each cell is a :class:`BlockSpec` or a callable ``u -> matrix``.  The
    matrix placed for cell ``(n, m)`` at spectral parameter ``u`` is
    ``exp(gamma[n, m] u) * cell(alpha[n, m] u)``; rates default to 0 and 1.
    """

    N1: int
    N2: int
    cells: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    alpha: dict = field(default_factory=dict)

    @property
    def label_maps(self) -> tuple[LabelMap, LabelMap]:
        return LabelMap(self.N1), LabelMap(self.N2)

    def required_pairs(self) -> list[tuple[int, int]]:
        lm1, lm2 = self.label_maps
        return [(n, m) for n in lm1.magnitudes for m in lm2.magnitudes]

    def cell_matrix(self, pair: tuple[int, int], u) -> np.ndarray:
        try:
            cell = self.cells[pair]
        except KeyError as exc:
            raise IncompleteBlockMapError(f"no cell for label pair {pair}") from exc
        x = self.alpha.get(pair, 1.0) * u
        if isinstance(cell, BlockSpec):
            block = cell.build_scalar(x) if pair == (0, 0) else cell.build(x)
        else:
            block = np.atleast_2d(np.asarray(cell(x), dtype=CDTYPE))
        size = cell_size(pair)
        if block.shape != (size, size):
            raise DimensionError(f"cell {pair} has shape {block.shape}, expected {size}x{size}")
        return np.exp(self.gamma.get(pair, 0.0) * u) * block

    @classmethod
    def uniform(cls, n1: int, n2: int, quad: Cell, odd: Optional[Cell] = None) -> "BlockMap":
        """Every 4x4 cell ``quad``; every 2x2 / 1x1 cell ``odd``."""
        bm = cls(n1, n2)
        for pair in bm.required_pairs():
            if cell_size(pair) == 4:
                bm.cells[pair] = quad
            elif odd is not None:
                bm.cells[pair] = odd
        return bm


def assemble_x_shaped(bm: BlockMap, u) -> np.ndarray:
    lm1, lm2 = bm.label_maps
    dim = bm.N1 * bm.N2
    out = np.zeros((dim, dim), dtype=CDTYPE)
    for pair in bm.required_pairs():
        idx = cell_states(lm1, lm2, pair)
        out[np.ix_(idx, idx)] = bm.cell_matrix(pair, u)
    return out


def extract_block(
    m, lm1: LabelMap, lm2: LabelMap, pair: tuple[int, int], gamma=0.0, u=0.0
) -> np.ndarray:
    """Cell ``pair`` of an assembled matrix; divides out ``exp(gamma u)`` when given."""
    m = np.asarray(m, dtype=CDTYPE)
    if m.shape != (lm1.N * lm2.N,) * 2:
        raise DimensionError(f"matrix shape {m.shape} does not match {lm1.N}x{lm2.N} sites")
    idx = cell_states(lm1, lm2, pair)
    return m[np.ix_(idx, idx)] / np.exp(gamma * u)


def is_x_shaped(m, atol: float = 0.0) -> bool:
    m = np.asarray(m)
    n = m.shape[0]
    r, c = np.nonzero(np.abs(m) > atol)
    return bool(np.all((r == c) | (r + c == n - 1)))


# -- M-matrix family -----------------------------------------------------------


@dataclass(frozen=True)
class MFamily:
    m: np.ndarray
    m_plus: np.ndarray
    m_minus: np.ndarray
    r: Optional[np.ndarray] = None


def m_matrix(dim: int) -> np.ndarray:
    if dim < 2 or dim % 2:
        raise UnsupportedDimensionError(f"M needs an even dimension, got {dim}")
    m = np.zeros((dim, dim), dtype=CDTYPE)
    for row in range(dim):
        m[row, dim - 1 - row] = 1.0 if row < dim // 2 else -1.0
    return m


def build_m_family(dim: int, u=None) -> MFamily:
    """``M`` with ``M^2 = -I``, ``M± = I ± M`` and, if ``u`` is given,
    ``R_M(u) = cosh(u) I + sinh(u) M``."""
    m = m_matrix(dim)
    eye = identity(dim)
    r = None if u is None else np.cosh(u) * eye + np.sinh(u) * m
    return MFamily(m, eye + m, eye - m, r)


# -- induced matrices ------------------------------------------------------------


def build_induced(r22, n1: int, n2: int, phases: Optional[Sequence[float]] = None, u=0.0):
    """``r22 ⊗ I_{n1 n2}``, or ``r22 ⊗ diag(exp(i phases u))`` when phases are given."""
    r22 = np.asarray(r22, dtype=CDTYPE)
    if r22.shape != (4, 4):
        raise DimensionError("induced matrices need a 4x4 seed")
    if phases is None:
        return np.kron(r22, identity(n1 * n2))
    phases = np.asarray(phases, dtype=float)
    if phases.size != n1 * n2:
        raise DimensionError(f"need {n1 * n2} phases, got {phases.size}")
    return np.kron(r22, np.diag(np.exp(1j * phases * u)))


# -- mixed-dimension 8x8 families ------------------------------------------------

MIXED_8X8_KINDS = ("trig42", "trig24", "xxz42", "xxz24")


def rate_pattern_ok(alphas: Sequence[complex]) -> bool:
    """The inner-cell rates must repeat the outer ones, straight or swapped."""
    a1, a2, a3, a4 = alphas
    return (a3, a4) == (a1, a2) or (a3, a4) == (a2, a1)


def _deformed(a, b, q=1.0, t=1.0):
    params = DeformedBlockParams(a, b, q, t)
    return lambda x: build_deformed_block(params, x)


def mixed_block_map(kind: str, params: Mapping, allow_invalid: bool = False) -> BlockMap:
    """BlockMap behind the mixed-dimension 8x8 matrices.

    ``trig42`` / ``trig24`` params: ``alphas`` (four rates), ``alpha``
    (prefactor rate of the inner cell), optional ``q``, ``t``.
    ``xxz42`` / ``xxz24`` params: ``variant``, ``u0``, ``ux``, ``a0``, ``ax``,
    ``gamma``, ``beta``, ``alpha`` (prefactor rate of the outer cell),
    optional ``variant_outer`` to mix kinds.
    """
    if kind not in MIXED_8X8_KINDS:
        raise InvalidPatternError(f"unknown 8x8 kind {kind!r}")
    n1, n2 = (4, 2) if kind.endswith("42") else (2, 4)
    outer = (2, 1) if n1 == 4 else (1, 2)
    bm = BlockMap(n1, n2)
    if kind.startswith("trig"):
        alphas = tuple(params["alphas"])
        if len(alphas) != 4:
            raise InvalidPatternError("trig 8x8 matrices need four rates")
        if not allow_invalid and not rate_pattern_ok(alphas):
            raise InvalidPatternError(f"rate assignment {alphas} is not a permissible pattern")
        q, t = params.get("q", 1.0), params.get("t", 1.0)
        a1, a2, a3, a4 = alphas
        bm.cells[outer] = _deformed(a1, a2, q, t)
        bm.cells[(1, 1)] = _deformed(a3, a4, q, t)
        bm.gamma[(1, 1)] = params.get("alpha", 0.0)
    else:
        variant = params.get("variant", "plus")
        inner = XxzBlockParams(params.get("u0", 1.0), params.get("gamma", 0.0), variant, params.get("a0", 1.0))
        out = XxzBlockParams(
            params.get("ux", params.get("u0", 1.0)),
            params.get("beta", 0.0),
            params.get("variant_outer", variant),
            params.get("ax", 1.0),
        )
        bm.cells[(1, 1)] = lambda x, p=inner: build_xxz_block(p, x)
        bm.cells[outer] = lambda x, p=out: build_xxz_block(p, x)
        bm.gamma[outer] = params.get("alpha", 0.0)
    return bm


def build_appendix_8x8(kind: str, params: Mapping, u, allow_invalid: bool = False) -> np.ndarray:
    return assemble_x_shaped(mixed_block_map(kind, params, allow_invalid), u)


# -- p-block generalization ----------------------------------------------------------


def p_block_index(p: int, n: int, label: int, color: int) -> int:
    """Flat index of ``(color, label)``: colors outermost, labels ``n..1`` within."""
    return color * n + (n - label)


def build_p_block_general(p: int, N: int, K: int, cells: Mapping, u=None) -> np.ndarray:
    """Assemble a ``(pN)^2 x (pK)^2`` matrix from ``p^2 x p^2`` cells.

    ``cells[(n, k)]`` (``1 <= n <= N``, ``1 <= k <= K``) is a matrix or, when
    ``u`` is given, a callable of ``u``.  Within a cell, the state ``(a, b)``
    of colors ``a, b`` in ``0..p-1`` sits at flat index ``a p + b``.
    """
    if p < 1 or N < 1 or K < 1:
        raise DimensionError("p, N and K must be positive")
    dim = p * N * p * K
    out = np.zeros((dim, dim), dtype=CDTYPE)
    for n in range(1, N + 1):
        for k in range(1, K + 1):
            try:
                cell = cells[(n, k)]
            except KeyError as exc:
                raise IncompleteBlockMapError(f"no cell for pair {(n, k)}") from exc
            block = np.asarray(cell(u) if callable(cell) else cell, dtype=CDTYPE)
            if block.shape != (p * p, p * p):
                raise DimensionError(f"cell {(n, k)} has shape {block.shape}, expected {p * p}x{p * p}")
            idx = [
                p_block_index(p, N, n, a) * (p * K) + p_block_index(p, K, k, b)
                for a in range(p)
                for b in range(p)
            ]
            out[np.ix_(idx, idx)] = block
    return out
