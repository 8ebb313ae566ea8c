"""Reference implementations that avoid the package's own code paths.

They trade speed for transparency: explicit index loops or tensor
contractions instead of Kronecker products and block placement.
"""

from __future__ import annotations

import itertools

import numpy as np


def embed(op, dims, start):
    """Act with ``op`` on sites ``start, start+1, ...`` via a tensor contraction."""
    dims = list(dims)
    op = np.asarray(op, dtype=complex)
    k = 0
    span = 1
    while span < op.shape[0]:
        span *= dims[start + k]
        k += 1
    sub = dims[start : start + k]
    t_op = op.reshape(sub + sub)
    total = int(np.prod(dims))
    out = np.zeros((total, total), dtype=complex)
    # out[(x), (y)] = op[x_sub, y_sub] * delta(x_rest, y_rest)
    for x in itertools.product(*[range(d) for d in dims]):
        xi = np.ravel_multi_index(x, dims)
        for ysub in itertools.product(*[range(d) for d in sub]):
            val = t_op[tuple(x[start : start + k]) + ysub]
            if val == 0:
                continue
            y = list(x)
            y[start : start + k] = ysub
            out[xi, np.ravel_multi_index(y, dims)] = val
    return out


def difference_residual(fa, fb, dims, start_a, start_b, u, v):
    A = lambda x: embed(fa(x), dims, start_a)
    B = lambda x: embed(fb(x), dims, start_b)
    lhs = A(u - v) @ B(u) @ A(v)
    rhs = B(v) @ A(u) @ B(u - v)
    return float(np.max(np.abs(lhs - rhs)))


def site_labels(n):
    """Labels of one site, highest first; the zero label only for odd ``n``."""
    h = n // 2
    return list(range(h, 0, -1)) + ([0] if n % 2 else []) + list(range(-1, -h - 1, -1))


def x_shape_by_labels(n1, n2, cell_of):
    """Build the X-shaped matrix by visiting every pair of basis states.

    ``cell_of(n, m)`` returns the block for magnitudes ``(n, m)``; within a
    block the states are ordered with positive labels first.
    """
    l1, l2 = site_labels(n1), site_labels(n2)
    dim = n1 * n2
    out = np.zeros((dim, dim), dtype=complex)
    for (i1, a1), (i2, a2) in itertools.product(enumerate(l1), enumerate(l2)):
        for (j1, b1), (j2, b2) in itertools.product(enumerate(l1), enumerate(l2)):
            if abs(a1) != abs(b1) or abs(a2) != abs(b2):
                continue
            block = np.atleast_2d(cell_of(abs(a1), abs(a2)))
            pos = lambda s1, s2: (0 if s1 >= 0 else 1) * (1 if a2 == 0 else 2) + (0 if s2 >= 0 else 1)
            out[i1 * n2 + i2, j1 * n2 + j2] = block[pos(a1, a2), pos(b1, b2)]
    return out


def transfer_by_loops(R, d, n):
    """``tau[j, i] = sum_k prod_r R[(j_{r-1}, k_r), (k_{r-1}, i_r)]`` on a ring of ``n`` sites."""
    w = np.asarray(R, dtype=complex).reshape(d, d, d, d)
    dim = d**n
    tau = np.zeros((dim, dim), dtype=complex)
    states = list(itertools.product(range(d), repeat=n))
    for jj in states:
        for ii in states:
            acc = 0.0
            for kk in states:
                prod = 1.0
                for r in range(n):
                    prod *= w[jj[r - 1], kk[r], kk[r - 1], ii[r]]
                    if prod == 0:
                        break
                acc += prod
            tau[np.ravel_multi_index(jj, [d] * n), np.ravel_multi_index(ii, [d] * n)] = acc
    return tau


def pure_state_concurrence(coeffs):
    """``sqrt(2 (1 - tr rho_A^2))`` of a normalized two-qubit pure state."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / np.linalg.norm(c)
    m = c.reshape(2, 2)
    rho = m @ m.conj().T
    return float(np.sqrt(max(0.0, 2 * (1 - np.real(np.trace(rho @ rho))))))


# Entries of the four-color 16x16 family; g = cosh(alpha_e u), f = sinh(alpha_e u).
R16_TABLE = (
    "g0 . . . . fa . . . . fb . . . . -fc",
    ". ga . . f0 . . . . . . fc . . -fb .",
    ". . gb . . . . fc f0 . . . . -fa . .",
    ". . . gc . . fb . . fa . . -f0 . . .",
    ". -f0 . . ga . . . . . . fb . . fc .",
    "-fa . . . . g0 . . . . fc . . . . fb",
    ". . . -fb . . gc . . f0 . . fa . . .",
    ". . -fc . . . . gb fa . . . . f0 . .",
    ". . -f0 . . . . -fa gb . . . . -fc . .",
    ". . . -fa . . -f0 . . gc . . -fb . . .",
    "-fb . . . . -fc . . . . g0 . . . . -fa",
    ". -fc . . -fb . . . . . . ga . . -f0 .",
    ". . . f0 . . -fa . . fb . . gc . . .",
    ". . fa . . . . -f0 fc . . . . gb . .",
    ". fb . . -fc . . . . . . f0 . . ga .",
    "fc . . . . -fb . . . . fa . . . . g0",
)


def r16_from_table(alphas, u):
    rate = dict(zip("0abc", alphas))
    out = np.zeros((16, 16), dtype=complex)
    for i, row in enumerate(R16_TABLE):
        for j, cell in enumerate(row.split()):
            if cell == ".":
                continue
            sign = -1 if cell.startswith("-") else 1
            kind, color = cell.lstrip("-")
            fn = np.cosh if kind == "g" else np.sinh
            out[i, j] = sign * fn(rate[color] * u)
    return out
