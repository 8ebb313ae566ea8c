"""Transfer matrices on cyclic chains and the spin-chain operators they generate."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import DimensionError, GuardExceededError, SingularParameterError
from .tensor import CDTYPE, SIGMA_X, SIGMA_Y, SIGMA_Z, as_cmatrix, embed_operator, identity

MAX_TRANSFER_DIM = 4096
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


@dataclass(frozen=True)
class ChainSpec:
    """Cyclic chain of ``n_sites`` identical sites carrying a two-site family."""

    n_sites: int
    site_dim: int
    family: Callable = field(compare=False)

    def __post_init__(self):
        if self.n_sites < 2:
            raise DimensionError("a cyclic chain needs at least two sites")
        if self.site_dim < 1:
            raise DimensionError("site dimension must be positive")
        if self.dim > MAX_TRANSFER_DIM:
            raise GuardExceededError(
                f"transfer matrix dimension {self.dim} exceeds the guard {MAX_TRANSFER_DIM}"
            )

    @property
    def dim(self) -> int:
        return self.site_dim**self.n_sites


def _weights(chain: ChainSpec, u) -> np.ndarray:
    d = chain.site_dim
    r = as_cmatrix(chain.family(u), square=True)
    if r.shape[0] != d * d:
        raise DimensionError(f"family gives {r.shape[0]}x{r.shape[0]}, expected {d * d}x{d * d}")
    return r.reshape(d, d, d, d)


def transfer_matrix(chain: ChainSpec, u) -> np.ndarray:
    """Row-to-row operator ``tau(u)``, indexed ``[j1..jN, i1..iN]``.

    ``tau = sum_k prod_r R[(j_{r-1}, k_r), (k_{r-1}, i_r)]`` with
    ``j_0 = j_N`` and ``k_0 = k_N``.
    """
    n = chain.n_sites
    w = _weights(chain, u)
    letters = string.ascii_letters
    j, i, k = letters[:n], letters[n : 2 * n], letters[2 * n : 3 * n]
    terms = [j[r - 1] + k[r] + k[r - 1] + i[r] for r in range(n)]
    spec = ",".join(terms) + "->" + j + i
    tau = np.einsum(spec, *([w] * n), optimize=True)
    return tau.reshape(chain.dim, chain.dim)


def transfer_commutator(chain: ChainSpec, u, v) -> float:
    a, b = transfer_matrix(chain, u), transfer_matrix(chain, v)
    return float(np.linalg.norm(a @ b - b @ a))


@dataclass(frozen=True)
class ExtractedHamiltonian:
    H: np.ndarray
    tau0_condition: float
    commutator_norm: Optional[float] = None
    probe_v: Optional[float] = None


def hamiltonian_extract(
    chain: ChainSpec, fd_step: float = 1e-5, probe_v: Optional[float] = None
) -> ExtractedHamiltonian:
    """``tau(0)^-1 (tau(h) - tau(-h)) / 2h``; optionally reports ``|[H, tau(probe_v)]|``."""
    tau0 = transfer_matrix(chain, 0.0)
    cond = float(np.linalg.cond(tau0))
    if not np.isfinite(cond) or cond > 1e8:
        raise SingularParameterError(f"tau(0) is singular (condition number {cond:.3g})")
    deriv = (transfer_matrix(chain, fd_step) - transfer_matrix(chain, -fd_step)) / (2 * fd_step)
    H = np.linalg.solve(tau0, deriv)
    comm = None
    if probe_v is not None:
        t = transfer_matrix(chain, probe_v)
        comm = float(np.linalg.norm(H @ t - t @ H))
    return ExtractedHamiltonian(H, cond, comm, probe_v)


def partition_function(chain: ChainSpec, n_rows: int, u) -> complex:
    """``tr tau(u)^n_rows`` on the torus."""
    if n_rows < 1:
        raise DimensionError("need at least one row")
    tau = transfer_matrix(chain, u)
    return complex(np.trace(np.linalg.matrix_power(tau, n_rows)))


# -- closed-form Hamiltonians -----------------------------------------------------------

HAMILTONIAN_KINDS = ("xyz-sets", "h44", "h2222")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Couplings ``J_a`` and chain layout.

    For ``xyz-sets``, ``spin_sets[i]`` is the number of spin-1/2 sets on site
    ``i`` (site dimension ``2 * spin_sets[i]``).  For ``h44`` and ``h2222``
    ``n_sites`` counts sites of dimension 4 and qubits respectively and
    ``couplings["J"]`` scales the whole operator.
    """

    couplings: Mapping = field(default_factory=lambda: {"x": 1.0, "y": 1.0, "z": 1.0})
    n_sites: int = 2
    spin_sets: Sequence[int] = ()
    periodic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "spin_sets", tuple(int(s) for s in self.spin_sets))
        if self.n_sites < 2:
            raise DimensionError("need at least two sites")


def composite_spin(n_sets: int, axis: str) -> np.ndarray:
    """``S^a`` on a site of ``n_sets`` spin-1/2 pairs ``(+n, -n)``, labels high to low.

    Each magnitude ``n`` owns the states ``|+n>, |-n>``; ``S^a`` acts as
    ``sigma^a`` on every such pair.
    """
    if n_sets < 1:
        raise DimensionError("a site needs at least one spin set")
    dim = 2 * n_sets
    s = np.zeros((dim, dim), dtype=CDTYPE)
    sigma = PAULI[axis]
    for n in range(1, n_sets + 1):
        idx = [n_sets - n, dim - 1 - (n_sets - n)]
        s[np.ix_(idx, idx)] += sigma
    return s


def xyz_density(n1: int, n2: int, couplings: Mapping) -> np.ndarray:
    return sum(
        complex(couplings.get(a, 0.0)) * np.kron(composite_spin(n1, a), composite_spin(n2, a))
        for a in "xyz"
    )


def _bond_sum(density, dims: Sequence[int], span: int, periodic: bool) -> np.ndarray:
    """Sum of ``density`` placed on every run of ``span`` consecutive sites."""
    L = len(dims)
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=CDTYPE)
    starts = range(L) if periodic else range(L - span + 1)
    for s in starts:
        if s + span <= L:
            total += embed_operator(density(s), dims, s)
        else:
            total += _wrapped(density(s), dims, s, span)
    return total


def _wrapped(op, dims, start, span) -> np.ndarray:
    """Embed an operator on sites ``start..start+span-1`` modulo the chain length."""
    L = len(dims)
    sites = [(start + t) % L for t in range(span)]
    order = sites + [s for s in range(L) if s not in sites]
    full = np.kron(op, identity(int(np.prod([dims[s] for s in order[span:]]))))
    # full acts on sites in `order`; permute back to natural order.
    perm_dims = [dims[s] for s in order]
    t = full.reshape(perm_dims * 2)
    inv = np.argsort(order)
    axes = list(inv) + [L + a for a in inv]
    return t.transpose(axes).reshape(full.shape)


def closed_form_hamiltonian(spec: HamiltonianSpec, kind: str) -> np.ndarray:
    if kind == "xyz-sets":
        sets = spec.spin_sets or (1,) * spec.n_sites
        if len(sets) != spec.n_sites:
            raise DimensionError("spin_sets must list one entry per site")
        dims = [2 * s for s in sets]
        L = len(sets)
        return _bond_sum(
            lambda s: xyz_density(sets[s], sets[(s + 1) % L], spec.couplings), dims, 2, spec.periodic
        )
    if kind == "h44":
        from .permutations import h44_density

        J = complex(spec.couplings.get("J", 1.0))
        return J * _bond_sum(lambda s: h44_density(), [4] * spec.n_sites, 2, spec.periodic)
    if kind == "h2222":
        from .permutations import r2222_generator

        if spec.n_sites < 4:
            raise DimensionError("the four-qubit density needs at least four qubits")
        J = complex(spec.couplings.get("J", 1.0))
        return J * _bond_sum(lambda s: r2222_generator(), [2] * spec.n_sites, 4, spec.periodic)
    raise DimensionError(f"unknown Hamiltonian kind {kind!r}; expected one of {HAMILTONIAN_KINDS}")


def z_parity_charge(n_sites: int) -> np.ndarray:
    """``prod_k (sigma_z ⊗ sigma_z)_k`` on ``n_sites`` four-dimensional sites."""
    zz = np.kron(SIGMA_Z, SIGMA_Z)
    out = zz
    for _ in range(n_sites - 1):
        out = np.kron(out, zz)
    return out


def cyclic_shift(n_sites: int, site_dim: int) -> np.ndarray:
    """Permutation moving the state of site ``r`` to site ``r + 1``."""
    dim = site_dim**n_sites
    t = np.eye(dim, dtype=CDTYPE).reshape([site_dim] * n_sites + [dim])
    t = np.moveaxis(t, n_sites - 1, 0)
    return t.reshape(dim, dim)


def fit_scale_and_shift(target, basis) -> tuple[complex, complex, float]:
    """Least-squares ``c, s`` minimizing ``|target - c basis - s I|``."""
    t = np.asarray(target, dtype=CDTYPE)
    b = np.asarray(basis, dtype=CDTYPE)
    eye = np.eye(t.shape[0], dtype=CDTYPE)
    A = np.stack([b.ravel(), eye.ravel()], axis=1)
    (c, s), *_ = np.linalg.lstsq(A, t.ravel(), rcond=None)
    res = float(np.max(np.abs(t - c * b - s * eye)))
    return complex(c), complex(s), res
