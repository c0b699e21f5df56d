"""Independent reference implementations used only to check the library.

Everything here is deliberately built by a different route than the package:
Kronecker-product Hamiltonians, eigendecomposition-based exponential
propagators, and direct adaptive quadrature of defining integrals.
"""

import numpy as np
from scipy.integrate import quad

SX = np.array([[0.0, 0.5], [0.5, 0.0]])
SZ = np.array([[0.5, 0.0], [0.0, -0.5]])
ID2 = np.eye(2)
N_OP = np.array([[0.0, 0.0], [0.0, 1.0]])


def site_operator(op, i, L):
    """op acting on site i (leftmost ket position = most significant bit)."""
    out = np.array([[1.0]])
    for j in range(L):
        out = np.kron(out, op if j == i else ID2)
    return out


def naive_ising(L, g, h):
    dim = 2 ** L
    H = np.zeros((dim, dim))
    for i in range(L - 1):
        H += site_operator(SZ, i, L) @ site_operator(SZ, i + 1, L)
    for i in range(L):
        H += g * site_operator(SX, i, L) + h * site_operator(SZ, i, L)
    return H


def naive_rydberg(positions, omega, phi, delta, c6):
    pos = np.asarray(positions, float)
    L = len(pos)
    dim = 2 ** L
    H = np.zeros((dim, dim), dtype=complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|
    for i in range(L):
        term = np.exp(1j * phi) * site_operator(lower, i, L)
        H += 0.5 * omega * (term + term.conj().T)
        H -= delta * site_operator(N_OP, i, L)
    for i in range(L):
        for j in range(i + 1, L):
            r6 = np.sum((pos[i] - pos[j]) ** 2) ** 3
            H += (c6 / r6) * (site_operator(N_OP, i, L) @ site_operator(N_OP, j, L))
    return H


def expm_product_propagate(hamiltonian_of_tau, psi0, T, n_slices):
    """Product of exact midpoint matrix exponentials over uniform slices."""
    psi = np.asarray(psi0, dtype=complex).copy()
    dt = T / n_slices
    for k in range(n_slices):
        tau_mid = (k + 0.5) / n_slices
        w, V = np.linalg.eigh(hamiltonian_of_tau(tau_mid))
        psi = V @ (np.exp(-1j * w * dt) * (V.conj().T @ psi))
    return psi


def quad_regularized_beta(x, a, b):
    total, _ = quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1), 0.0, 1.0,
                    epsabs=1e-14, epsrel=1e-13, limit=300)
    if x == 0.0:
        return 0.0
    part, _ = quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1), 0.0, x,
                   epsabs=1e-14, epsrel=1e-13, limit=300)
    return part / total


def quad_elliptic_e(phi, m):
    val, _ = quad(lambda t: np.sqrt(1.0 - m * np.sin(t) ** 2), 0.0, phi,
                  epsabs=1e-14, epsrel=1e-13, limit=300)
    return val
