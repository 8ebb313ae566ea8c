"""Dense complex matrix helpers shared by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Tensor products
use the "leftmost factor is most significant" convention, so the flat index of
a product state ``(i1, i2, ..., iL)`` over site dimensions ``(d1, ..., dL)`` is
the usual row-major one.  Inside one site of dimension ``N`` flat index 0 is
the highest label and ``N - 1`` the lowest.

A matrix element ``m[r, c]`` is the amplitude for input state ``c`` to go to
output state ``r``.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError

CDTYPE = np.complex128

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=CDTYPE)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=CDTYPE)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=CDTYPE)
I2 = np.eye(2, dtype=CDTYPE)


class Residual(NamedTuple):
    max_abs: float
    frobenius: float


def as_cmatrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-d complex array."""
    m = np.asarray(a, dtype=CDTYPE)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if m.size == 0:
        raise DimensionError("matrix must have at least one entry")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError("matrix has non-finite entries")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=CDTYPE)


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(*factors) -> np.ndarray:
    return reduce(kron, factors)


def dagger(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def embed_operator(op, dims: Sequence[int], start: int) -> np.ndarray:
    """Return ``I ⊗ op ⊗ I`` with ``op`` acting on a contiguous run of sites.

    The run begins at site ``start`` and its length is inferred from the
    dimension of ``op``.
    """
    op = as_cmatrix(op, square=True)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"site dimensions must be positive: {dims}")
    if not 0 <= start < len(dims):
        raise DimensionError(f"start site {start} outside chain of {len(dims)} sites")
    n = op.shape[0]
    span_dim, stop = 1, start
    while span_dim < n and stop < len(dims):
        span_dim *= dims[stop]
        stop += 1
    if span_dim != n or stop == start:
        raise DimensionError(
            f"operator of dimension {n} does not factor over sites {dims[start:]}"
            f" starting at {start}"
        )
    left = int(np.prod(dims[:start], dtype=np.int64))
    right = int(np.prod(dims[stop:], dtype=np.int64))
    return np.kron(np.kron(identity(left), op), identity(right))


def residual_norm(a, b) -> Residual:
    a = np.asarray(a, dtype=CDTYPE)
    b = np.asarray(b, dtype=CDTYPE)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a - b
    if d.size == 0:
        return Residual(0.0, 0.0)
    return Residual(float(np.max(np.abs(d))), float(np.linalg.norm(d)))


def matrix_to_json(m) -> dict:
    m = as_cmatrix(m)
    flat = m.ravel()
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise DimensionError("matrix entry arrays do not match rows*cols")
    return as_cmatrix((re + 1j * im).reshape(rows, cols))
