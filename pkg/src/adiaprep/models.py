"""Spin-chain Hamiltonians and the parameter-space paths that drive them.

Two concrete families:

* a mixed-field Ising chain (open boundaries, antiferromagnetic ZZ coupling,
  spin-1/2 operators S = sigma/2) driven along a semicircular arc in the
  (transverse, longitudinal) field plane, and
* a chain of Rydberg atoms with van der Waals interactions driven along a
  constant-speed ellipse in the (detuning, Rabi frequency) plane.

Basis convention: basis index b spells the ket string in binary, site i at
bit position L-1-i.  Bit value 0 means S^z = +1/2 (Ising) and the atomic
ground state (Rydberg); so the ket |0101...> is basis index int("0101...", 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import special

from .errors import DomainError, ResourceLimitError
from .specfun import as_unit_interval, elliptic_e, elliptic_e_inv

__all__ = [
    "C6_DEFAULT",
    "DEFAULT_DIM_CAP",
    "SpinChainOperator",
    "IsingParams",
    "RydbergParams",
    "EllipticPathParams",
    "ising_hamiltonian",
    "rydberg_hamiltonian",
    "semicircle_path",
    "elliptic_path",
    "path_hamiltonian",
    "IsingSemicirclePath",
    "RydbergEllipticPath",
    "MatrixPath",
    "chain_positions",
    "ket_index",
    "neel_ket",
]

#: Van der Waals coefficient of the simulated Rydberg level, rad/us * um^6.
C6_DEFAULT = 862690.0 * 2.0 * math.pi

#: Largest Hilbert-space dimension built without an explicit override.
DEFAULT_DIM_CAP = 1 << 22


@dataclass(frozen=True)
class SpinChainOperator:
    """Hermitian operator on the 2^L-dimensional chain Hilbert space."""

    matrix: sp.csr_matrix
    num_sites: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return float(abs(d).max()) if d.nnz else 0.0


@dataclass(frozen=True)
class IsingParams:
    """Mixed-field Ising chain: H = sum S^z_i S^z_{i+1} + sum (g S^x_i + h S^z_i)."""

    L: int
    g: float
    h: float

    def __post_init__(self):
        if self.L < 2:
            raise DomainError(f"Ising chain needs L >= 2 sites; got {self.L}")


@dataclass(frozen=True)
class RydbergParams:
    """Driven Rydberg chain in rad/us and um.

    H = (Omega/2) sum_i (e^{i phi} |0_i><1_i| + h.c.) - Delta sum_i n_i
        + sum_{i<j} n_i n_j C6 / |r_i - r_j|^6
    """

    positions: tuple
    omega: float
    phi: float = 0.0
    delta: float = 0.0
    c6: float = C6_DEFAULT

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or len(pos) < 1:
            raise DomainError("positions must be a nonempty list of 2D coordinates (um)")
        if len(pos) > 1:
            diff = pos[:, None, :] - pos[None, :, :]
            dist = np.sqrt((diff ** 2).sum(-1))
            off = dist[~np.eye(len(pos), dtype=bool)]
            if np.any(off <= 0.0):
                raise DomainError("atoms must sit at pairwise distinct positions")

    @property
    def L(self) -> int:
        return len(self.positions)


def chain_positions(L: int, spacing_um: float = 5.6) -> tuple:
    """Equally spaced 1D chain laid out along the x axis."""
    return tuple((i * spacing_um, 0.0) for i in range(L))


@dataclass(frozen=True)
class EllipticPathParams:
    """Ellipse (Delta_R cos theta, Omega_R sin theta) traversed at constant speed.

    Requires 0 < Omega_R < Delta_R, so the eccentricity e is in (0, 1) and the
    elliptic parameter m = e^2 / (e^2 - 1) is negative.
    """

    omega_r: float = 2.5 * 2.0 * math.pi
    delta_r: float = 8.75 * 2.0 * math.pi

    def __post_init__(self):
        if not (0.0 < self.omega_r < self.delta_r):
            raise DomainError(
                f"need 0 < Omega_R < Delta_R; got {self.omega_r}, {self.delta_r}"
            )

    @property
    def eccentricity(self) -> float:
        return math.sqrt(1.0 - (self.omega_r / self.delta_r) ** 2)

    @property
    def m(self) -> float:
        e2 = self.eccentricity ** 2
        return e2 / (e2 - 1.0)

    @property
    def perimeter(self) -> float:
        return 4.0 * self.delta_r * elliptic_e(math.pi / 2.0, self.eccentricity ** 2)


def _check_dim(L: int, dim_cap: int):
    if 2 ** L > dim_cap:
        raise ResourceLimitError(
            f"2^{L} states exceed the configured cap of {dim_cap}; "
            "raise the cap explicitly to proceed"
        )


def _site_bits(L: int) -> np.ndarray:
    """(dim, L) array of bit values; column i is site i (bit position L-1-i)."""
    b = np.arange(2 ** L, dtype=np.int64)
    shifts = L - 1 - np.arange(L)
    return ((b[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def _flip_matrix(L: int) -> sp.csr_matrix:
    """Sum over sites of single-bit flips with amplitude 1/2 (i.e. sum_i S^x_i)."""
    dim = 2 ** L
    b = np.arange(dim, dtype=np.int64)
    rows = np.repeat(b, L)
    cols = (b[:, None] ^ (1 << (L - 1 - np.arange(L)))[None, :]).ravel()
    data = np.full(rows.shape, 0.5)
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))


def ising_hamiltonian(p: IsingParams, dim_cap: int = DEFAULT_DIM_CAP) -> SpinChainOperator:
    """Sparse mixed-field Ising Hamiltonian with open boundaries."""
    _check_dim(p.L, dim_cap)
    bits = _site_bits(p.L)
    sz = 0.5 - bits  # bit 0 -> +1/2
    diag = (sz[:, :-1] * sz[:, 1:]).sum(axis=1) + p.h * sz.sum(axis=1)
    H = sp.diags(diag, format="csr") + p.g * _flip_matrix(p.L)
    return SpinChainOperator(matrix=H.tocsr(), num_sites=p.L)


def semicircle_path(tau):
    """Field arc g = sin(pi tau)/2, h = -(1 + cos(pi tau)/2).

    Runs from (g, h) = (0, -1.5) through (0.5, -1) to (0, -0.5); the operator
    norm of dH/dtau is constant along it.
    """
    t = as_unit_interval(tau, name="tau")
    g = 0.5 * np.sin(np.pi * np.asarray(t))
    h = -(1.0 + 0.5 * np.cos(np.pi * np.asarray(t)))
    if np.isscalar(t):
        return float(g), float(h)
    return g, h


def _interaction_diagonal(positions, c6: float) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    L = len(pos)
    bits = _site_bits(L).astype(float)
    diff = pos[:, None, :] - pos[None, :, :]
    dist6 = ((diff ** 2).sum(-1)) ** 3
    diag = np.zeros(2 ** L)
    for i in range(L):
        for j in range(i + 1, L):
            diag += bits[:, i] * bits[:, j] * (c6 / dist6[i, j])
    return diag


def rydberg_hamiltonian(p: RydbergParams, dim_cap: int = DEFAULT_DIM_CAP) -> SpinChainOperator:
    """Sparse Rydberg-chain Hamiltonian (all-to-all van der Waals tails)."""
    L = p.L
    _check_dim(L, dim_cap)
    bits = _site_bits(L)
    diag = _interaction_diagonal(p.positions, p.c6) - p.delta * bits.sum(axis=1)
    flip = _flip_matrix(L)
    if p.phi == 0.0:
        H = sp.diags(diag, format="csr") + p.omega * flip
    else:
        # e^{i phi}|0><1| lowers the bit: phase on the (cleared, set) element.
        dim = 2 ** L
        b = np.arange(dim, dtype=np.int64)
        rows, cols, data = [], [], []
        for i in range(L):
            mask = 1 << (L - 1 - i)
            set_states = b[(b & mask) != 0]
            rows.append(set_states ^ mask)
            cols.append(set_states)
            data.append(np.full(len(set_states), 0.5 * p.omega * np.exp(1j * p.phi)))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        data = np.concatenate(data)
        upper = sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))
        H = sp.diags(diag.astype(complex), format="csr") + upper + upper.getH()
    return SpinChainOperator(matrix=H.tocsr(), num_sites=L)


def elliptic_path(tau, p: EllipticPathParams = EllipticPathParams()):
    """Constant-speed sweep (Delta, Omega) along the ellipse.

    theta(tau) inverts the arc-length integral, theta: 0 -> pi, so the sweep
    starts at (Delta_R, 0), passes (0, Omega_R), and ends at (-Delta_R, 0)
    with |d(Delta, Omega)/dtau| constant.
    """
    t = as_unit_interval(tau, name="tau")
    scalar = np.isscalar(t)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    u = p.perimeter * ts / (2.0 * p.omega_r)
    thetas = np.asarray([elliptic_e_inv(ui, p.m) for ui in u])
    delta = p.delta_r * np.cos(thetas)
    omega = p.omega_r * np.sin(thetas)
    if scalar:
        return float(delta[0]), float(omega[0])
    return delta, omega


class HamiltonianPath:
    """A map s in [0, 1] -> Hermitian operator, split into fixed terms.

    Subclasses provide ``diagonal(s)`` and ``flip_coefficient(s)`` over a
    shared flip matrix, which is all the evolution and spectral layers need.
    """

    num_sites: int

    @property
    def dim(self) -> int:
        return 2 ** self.num_sites

    def diagonal(self, s: float) -> np.ndarray:
        raise NotImplementedError

    def flip_coefficient(self, s: float) -> float:
        raise NotImplementedError

    def matvec(self, s: float, psi: np.ndarray) -> np.ndarray:
        return self.diagonal(s) * psi + self.flip_coefficient(s) * (self._flip @ psi)

    def operator(self, s: float) -> SpinChainOperator:
        H = sp.diags(self.diagonal(s), format="csr") + self.flip_coefficient(s) * self._flip
        return SpinChainOperator(matrix=H.tocsr(), num_sites=self.num_sites)

    def norm_bound(self, n_grid: int = 33) -> float:
        """Gershgorin bound on max_s ||H(s)||_2."""
        out = 0.0
        for s in np.linspace(0.0, 1.0, n_grid):
            bound = float(np.abs(self.diagonal(s)).max())
            bound += abs(self.flip_coefficient(s)) * 0.5 * self.num_sites
            out = max(out, bound)
        return out


class IsingSemicirclePath(HamiltonianPath):
    """Mixed-field Ising chain driven along the semicircular field arc."""

    def __init__(self, L: int, dim_cap: int = DEFAULT_DIM_CAP):
        if L < 2:
            raise DomainError(f"Ising chain needs L >= 2 sites; got {L}")
        _check_dim(L, dim_cap)
        self.num_sites = L
        bits = _site_bits(L)
        sz = 0.5 - bits
        self._diag_zz = (sz[:, :-1] * sz[:, 1:]).sum(axis=1)
        self._diag_z = sz.sum(axis=1)
        self._flip = _flip_matrix(L)

    def fields(self, s: float):
        return semicircle_path(s)

    def diagonal(self, s: float) -> np.ndarray:
        h = -(1.0 + 0.5 * math.cos(math.pi * s))
        return self._diag_zz + h * self._diag_z

    def flip_coefficient(self, s: float) -> float:
        return 0.5 * math.sin(math.pi * s)

    def matvec(self, s: float, psi: np.ndarray) -> np.ndarray:
        h = -(1.0 + 0.5 * math.cos(math.pi * s))
        g = 0.5 * math.sin(math.pi * s)
        return self._diag_zz * psi + h * (self._diag_z * psi) + g * (self._flip @ psi)

    def describe(self) -> dict:
        return {"model": "ising", "L": self.num_sites, "path": "semicircle"}


class RydbergEllipticPath(HamiltonianPath):
    """Rydberg chain driven along the constant-speed detuning/Rabi ellipse.

    ``start_ferromagnetic`` flips the sign of Delta(tau) so the sweep begins
    at large negative detuning (all-ground-state side) and ends on the
    ordered side; the plain orientation follows the ellipse as parametrized.
    """

    def __init__(self, positions, params: EllipticPathParams = EllipticPathParams(),
                 start_ferromagnetic: bool = False, c6: float = C6_DEFAULT,
                 dim_cap: int = DEFAULT_DIM_CAP):
        ryd = RydbergParams(positions=tuple(map(tuple, positions)), omega=0.0, c6=c6)
        L = ryd.L
        _check_dim(L, dim_cap)
        self.num_sites = L
        self.positions = ryd.positions
        self.params = params
        self.start_ferromagnetic = bool(start_ferromagnetic)
        self.c6 = c6
        bits = _site_bits(L)
        self._diag_int = _interaction_diagonal(self.positions, c6)
        self._diag_n = bits.sum(axis=1).astype(float)
        self._flip = _flip_matrix(L)
        # Arc-length inversion table: theta grid vs u = E(theta, m), refined
        # by one Newton step on lookup (interpolation error ~1e-8 squared).
        self._theta_grid = np.linspace(0.0, math.pi, 20_001)
        self._u_grid = np.asarray(elliptic_e(self._theta_grid, params.m))
        self._u_max = float(self._u_grid[-1])

    def _theta(self, s: float) -> float:
        u = min(max(self.params.perimeter * s / (2.0 * self.params.omega_r), 0.0),
                self._u_max)
        idx = min(int(np.searchsorted(self._u_grid, u)), len(self._u_grid) - 1)
        lo = max(idx - 1, 0)
        du = self._u_grid[idx] - self._u_grid[lo]
        frac = (u - self._u_grid[lo]) / du if du > 0 else 0.0
        theta = self._theta_grid[lo] + frac * (self._theta_grid[idx] - self._theta_grid[lo])
        for _ in range(2):
            d = math.sqrt(1.0 - self.params.m * math.sin(theta) ** 2)
            theta -= (float(special.ellipeinc(theta, self.params.m)) - u) / d
        return min(max(theta, 0.0), math.pi)

    def fields(self, s: float):
        theta = self._theta(s)
        delta = self.params.delta_r * math.cos(theta)
        omega = self.params.omega_r * math.sin(theta)
        if self.start_ferromagnetic:
            delta = -delta
        return delta, omega

    def diagonal(self, s: float) -> np.ndarray:
        delta, _ = self.fields(s)
        return self._diag_int - delta * self._diag_n

    def flip_coefficient(self, s: float) -> float:
        _, omega = self.fields(s)
        return omega

    def matvec(self, s: float, psi: np.ndarray) -> np.ndarray:
        delta, omega = self.fields(s)
        return (self._diag_int * psi - delta * (self._diag_n * psi)
                + omega * (self._flip @ psi))

    def describe(self) -> dict:
        return {
            "model": "rydberg",
            "L": self.num_sites,
            "path": "elliptic",
            "start_ferromagnetic": self.start_ferromagnetic,
        }


class MatrixPath(HamiltonianPath):
    """Adapter wrapping an arbitrary map s -> dense Hermitian matrix."""

    def __init__(self, fn, dim: int):
        self._fn = fn
        self._dim = dim
        self.num_sites = max(int(round(math.log2(dim))), 1)

    @property
    def dim(self) -> int:
        return self._dim

    def matvec(self, s, psi):
        return np.asarray(self._fn(s)) @ psi

    def operator(self, s) -> SpinChainOperator:
        return SpinChainOperator(matrix=sp.csr_matrix(np.asarray(self._fn(s))),
                                 num_sites=self.num_sites)

    def norm_bound(self, n_grid: int = 33) -> float:
        return max(
            float(np.linalg.norm(np.asarray(self._fn(s)), 2))
            for s in np.linspace(0.0, 1.0, n_grid)
        )

    def describe(self) -> dict:
        return {"model": "custom", "dim": self._dim}


def path_hamiltonian(path: HamiltonianPath, s_value) -> SpinChainOperator:
    """Operator at path point s (path and model composed)."""
    return path.operator(as_unit_interval(s_value, name="s"))


def ket_index(ket: str) -> int:
    """Basis index of a ket string like '0101'."""
    return int(ket, 2)


def neel_ket(L: int) -> str:
    """Alternating string '0101...' of length L (starts with 0)."""
    return "".join("01"[i % 2] for i in range(L))
