"""Instantaneous eigenpairs, gap profiles, and first-order leakage estimates."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateGapError, DomainError, NoConvergenceError
from .models import HamiltonianPath, SpinChainOperator
from .specfun import as_unit_interval

__all__ = [
    "SpectralData",
    "GapProfile",
    "lowest_eigenpairs",
    "gap_profile",
    "gamma0",
    "first_order_infidelity",
    "ground_state",
]

#: Below this dimension eigenproblems go straight to dense LAPACK; above it a
#: Lanczos solve of the k lowest pairs is much faster for our sparse chains.
DENSE_CUTOFF = 1024

_RESIDUAL_BOUND = 1e-9
_DEGENERACY_WARN = 1e-10


@dataclass(frozen=True)
class SpectralData:
    """Lowest eigenpairs of one Hamiltonian, phase-fixed and sorted."""

    energies: np.ndarray
    states: np.ndarray  # column k is the k-th eigenvector

    @property
    def e0(self) -> float:
        return float(self.energies[0])

    @property
    def e1(self) -> float:
        return float(self.energies[1])

    @property
    def gap(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def phi0(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def phi1(self) -> np.ndarray:
        return self.states[:, 1]


def _fix_phases(states: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude amplitude is real positive."""
    out = states.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        pivot = out[idx, k]
        if pivot != 0:
            out[:, k] = out[:, k] * (abs(pivot) / pivot)
    if np.isrealobj(states):
        return out.real
    return out


def _as_matrix(H):
    if isinstance(H, SpinChainOperator):
        return H.matrix
    return H


_DETERMINISTIC_SEED_CACHE: dict[int, np.ndarray] = {}


def _start_vector(dim: int) -> np.ndarray:
    """Fixed, generic Lanczos start vector so repeated runs are bit-identical."""
    if dim not in _DETERMINISTIC_SEED_CACHE:
        v = np.cos(0.7 * np.arange(dim) + 0.3)
        _DETERMINISTIC_SEED_CACHE[dim] = v / np.linalg.norm(v)
    return _DETERMINISTIC_SEED_CACHE[dim]


def lowest_eigenpairs(H, k: int = 2, method: str = "auto") -> SpectralData:
    """The k lowest eigenpairs of a Hermitian operator.

    Dense LAPACK below ``DENSE_CUTOFF`` (or when the subspace is a large
    fraction of the space), reorthogonalized Lanczos otherwise.  Eigenvector
    phases are fixed by making the largest-magnitude amplitude real positive.
    Emits a warning when the ground state is (near-)degenerate.
    """
    mat = _as_matrix(H)
    dim = mat.shape[0]
    if k < 1 or k > dim:
        raise DomainError(f"need 1 <= k <= dim; got k={k}, dim={dim}")
    if method not in ("auto", "dense", "krylov"):
        raise DomainError(f"unknown eigensolver method {method!r}")
    use_dense = method == "dense" or (
        method == "auto" and (dim <= DENSE_CUTOFF or k > dim // 4)
    )
    if use_dense:
        dense = mat.toarray() if sp.issparse(mat) else np.asarray(mat)
        vals, vecs = scipy.linalg.eigh(dense, subset_by_index=[0, k - 1])
    else:
        try:
            vals, vecs = spla.eigsh(mat, k=k, which="SA", v0=_start_vector(dim))
        except spla.ArpackNoConvergence as exc:
            raise NoConvergenceError(f"Lanczos eigensolve failed: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]

    vecs = _fix_phases(vecs)
    norm_scale = max(float(abs(vals).max()), 1.0)
    residual = np.linalg.norm(mat @ vecs - vecs * vals[None, :], axis=0)
    if np.any(residual > _RESIDUAL_BOUND * max(norm_scale, _spectral_scale(mat))):
        raise NoConvergenceError(
            f"eigenpair residual {residual.max():.2e} exceeds bound"
        )
    if k >= 2 and vals[1] - vals[0] < _DEGENERACY_WARN:
        warnings.warn(
            f"ground state nearly degenerate: gap={vals[1] - vals[0]:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return SpectralData(energies=vals, states=vecs)


def _spectral_scale(mat) -> float:
    if sp.issparse(mat):
        return float(spla.norm(mat, np.inf))
    return float(np.linalg.norm(mat, np.inf))


def ground_state(path: HamiltonianPath, s: float, k: int = 2,
                 method: str = "auto") -> SpectralData:
    """Eigenpairs of the path Hamiltonian at point s (cached per path)."""
    return _ground_state_cached(path, round(float(s), 15), k, method)


@lru_cache(maxsize=2048)
def _ground_state_cached(path, s, k, method):
    return lowest_eigenpairs(path.operator(s), k=k, method=method)


@dataclass(frozen=True)
class GapProfile:
    """Tabulated gap between the two lowest levels along a path."""

    s: np.ndarray
    gap: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.s) <= 0):
            raise DomainError("gap profile grid must be strictly increasing")
        if np.any(self.gap <= 0):
            raise DomainError("gap profile must be strictly positive")

    def interpolator(self):
        return PchipInterpolator(self.s, self.gap)

    def __call__(self, s):
        sv = np.clip(np.asarray(s, dtype=float), self.s[0], self.s[-1])
        out = self.interpolator()(sv)
        return float(out) if np.isscalar(s) else out

    @property
    def min_gap(self) -> float:
        return float(self.gap.min())

    def to_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(["s", "gap"])
            for row in zip(self.s, self.gap):
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "GapProfile":
        ss, gaps = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(line for line in fh if not line.startswith("#")):
                if not row or row[0] == "s":
                    continue
                ss.append(float(row[0]))
                gaps.append(float(row[1]))
        return cls(s=np.asarray(ss), gap=np.asarray(gaps))


def gap_profile(path: HamiltonianPath, grid_size: int = 101,
                method: str = "auto") -> GapProfile:
    """Gap between ground and first excited state on a uniform s grid."""
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    ss = np.linspace(0.0, 1.0, grid_size)
    gaps = np.empty(grid_size)
    for i, s in enumerate(ss):
        gaps[i] = lowest_eigenpairs(path.operator(s), k=2, method=method).gap
    return GapProfile(s=ss, gap=gaps)


def gamma0(path: HamiltonianPath, tau: float, dtau: float = 1e-5,
           method: str = "auto") -> float:
    """Norm of the component of d(ground state)/dtau orthogonal to the ground state.

    Computed from a one-sided finite difference of the tracked ground state:
    || (1 - |Phi0><Phi0|) (Phi0(tau+dtau) - Phi0(tau)) || / dtau, which equals
    sqrt(1 - |<Phi0(tau)|Phi0(tau+dtau)>|^2) / dtau and is invariant under
    phase changes of either eigenvector.  Raises
    :class:`DegenerateGapError` when state tracking across dtau fails.
    """
    tau = as_unit_interval(tau, name="tau")
    if dtau <= 0:
        raise DomainError("dtau must be positive")
    a, b = (tau, tau + dtau) if tau + dtau <= 1.0 else (tau - dtau, tau)
    phi_a = ground_state(path, a, k=1, method=method).states[:, 0]
    phi_b = ground_state(path, b, k=1, method=method).states[:, 0]
    overlap = np.vdot(phi_a, phi_b)
    if abs(overlap) < 0.5:
        raise DegenerateGapError(
            f"ground-state tracking failed across dtau={dtau} at tau={tau}: "
            f"|overlap|={abs(overlap):.3f}"
        )
    # Residual-vector form of sqrt(1 - |overlap|^2)/dtau; subtracting the
    # projection before taking the norm avoids cancellation at small dtau.
    residual = phi_b - overlap * phi_a
    return float(np.linalg.norm(residual) / dtau)


def first_order_infidelity(path: HamiltonianPath, tau: float, eps: float,
                           dtau: float = 1e-5, method: str = "auto") -> float:
    """Leading leakage estimate eps * gamma0(tau) / gap(tau).

    Treats all leakage as going to the first excited state, so it is a
    conservative (slightly high) estimate; exactly linear in eps.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    gap = ground_state(path, as_unit_interval(tau, name="tau"), k=2, method=method).gap
    return eps * gamma0(path, tau, dtau=dtau, method=method) / gap
