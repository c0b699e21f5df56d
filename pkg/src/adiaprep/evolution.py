"""Schrodinger evolution along a scheduled Hamiltonian path, plus sweeps.

Works in rescaled time tau = t/T on [0, 1], where the state obeys
i * eps * dpsi/dtau = H(s(tau)) psi with eps = 1/T.  The integrator contract
is step-halving convergence and norm preservation, not a particular method:
the default is adaptive 8th-order explicit Runge-Kutta; a fixed-step
classical RK4 backend is kept for cross-checks.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .models import HamiltonianPath
from .schedules import Schedule
from .spectral import ground_state

__all__ = [
    "EvolutionConfig",
    "TrajectoryRecord",
    "EvolutionResult",
    "SweepRow",
    "evolve",
    "instantaneous_infidelity",
    "adiabatic_distance",
    "final_infidelity",
    "sweep",
    "write_sweep_csv",
    "write_trajectory_csv",
    "schedule_descriptor",
]


def instantaneous_infidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """delta = sqrt(1 - |<psi|phi>|^2); 0 for identical rays, 1 for orthogonal."""
    overlap2 = abs(np.vdot(psi, phi)) ** 2
    return float(np.sqrt(max(1.0 - overlap2, 0.0)))


def adiabatic_distance(psi: np.ndarray, phi: np.ndarray, phase: float) -> float:
    """Norm distance || psi - e^{-i phase} phi || to the dynamically phased eigenstate."""
    return float(np.linalg.norm(psi - np.exp(-1j * phase) * np.asarray(phi, complex)))


@dataclass(frozen=True)
class EvolutionConfig:
    """One adiabatic run: path + schedule + total time T (so eps = 1/T)."""

    path: HamiltonianPath
    schedule: Schedule
    T: float
    tolerance: float = 1e-12
    samples: int = 200
    backend: str = "dop853"
    rk4_min_steps: int = 10_000
    rk4_steps_per_unit: float = 50.0
    eig_method: str = "auto"

    def __post_init__(self):
        if self.T <= 0:
            raise DomainError(f"total time must be positive; got T={self.T}")
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        if self.backend not in ("dop853", "rk4"):
            raise DomainError(f"unknown integrator backend {self.backend!r}")

    @property
    def eps(self) -> float:
        return 1.0 / self.T


@dataclass(frozen=True)
class TrajectoryRecord:
    """Diagnostics sampled along one evolution.

    ``delta`` is the instantaneous infidelity against the freshly solved
    ground state, ``overlap`` its |<psi|Phi0>|, and ``phase`` the accumulated
    integral of E0 over tau (multiply by T for the dynamical phase of the
    adiabatic distance).
    """

    tau: np.ndarray
    delta: np.ndarray
    overlap: np.ndarray
    norm: np.ndarray
    phase: np.ndarray


@dataclass(frozen=True)
class EvolutionResult:
    final: np.ndarray
    record: TrajectoryRecord


def _rhs(path, schedule, T):
    scale = -1j * T

    def fun(tau, psi):
        if tau < 0.0:
            tau = 0.0
        elif tau > 1.0:
            tau = 1.0
        return scale * path.matvec(schedule.scalar(tau), psi)

    return fun


def _integrate_dop853(cfg: EvolutionConfig, psi0: np.ndarray, t_eval: np.ndarray):
    sol = solve_ivp(
        _rhs(cfg.path, cfg.schedule, cfg.T),
        (0.0, 1.0),
        psi0.astype(complex),
        method="DOP853",
        t_eval=t_eval,
        rtol=cfg.tolerance,
        atol=cfg.tolerance * 1e-2,
    )
    if not sol.success:
        raise DomainError(f"integration failed: {sol.message}")
    return sol.y.T


def _integrate_rk4(cfg: EvolutionConfig, psi0: np.ndarray, t_eval: np.ndarray):
    """Classical fixed-step RK4 with the step count tied to T * ||H||."""
    n_intervals = len(t_eval) - 1
    raw = max(cfg.rk4_min_steps,
              int(math.ceil(cfg.rk4_steps_per_unit * cfg.T * cfg.path.norm_bound())))
    per = max(int(math.ceil(raw / max(n_intervals, 1))), 1)
    fun = _rhs(cfg.path, cfg.schedule, cfg.T)
    psi = psi0.astype(complex)
    out = np.empty((len(t_eval), len(psi0)), dtype=complex)
    out[0] = psi
    for seg in range(n_intervals):
        a, b = t_eval[seg], t_eval[seg + 1]
        h = (b - a) / per
        tau = a
        for _ in range(per):
            k1 = fun(tau, psi)
            k2 = fun(tau + 0.5 * h, psi + 0.5 * h * k1)
            k3 = fun(tau + 0.5 * h, psi + 0.5 * h * k2)
            k4 = fun(tau + h, psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            tau += h
        out[seg + 1] = psi
    return out


def evolve(cfg: EvolutionConfig, psi0: np.ndarray | None = None) -> EvolutionResult:
    """Integrate one run and sample infidelity diagnostics along it.

    The initial state defaults to the solved ground state at s(0); pass
    ``psi0`` to start elsewhere.  Instantaneous eigenstates are recomputed at
    the ``samples`` record points only.
    """
    samples = max(int(cfg.samples), 2)
    t_eval = np.linspace(0.0, 1.0, samples)
    if psi0 is None:
        start = ground_state(cfg.path, cfg.schedule(0.0), k=1, method=cfg.eig_method)
        psi0 = start.states[:, 0]

    if cfg.backend == "rk4":
        states = _integrate_rk4(cfg, psi0, t_eval)
    else:
        states = _integrate_dop853(cfg, psi0, t_eval)

    deltas = np.empty(samples)
    overlaps = np.empty(samples)
    norms = np.empty(samples)
    energies = np.empty(samples)
    for i, tau in enumerate(t_eval):
        data = ground_state(cfg.path, cfg.schedule(tau), k=1, method=cfg.eig_method)
        phi = data.states[:, 0]
        psi = states[i]
        norms[i] = np.linalg.norm(psi)
        overlaps[i] = abs(np.vdot(psi, phi)) / norms[i]
        deltas[i] = float(np.sqrt(max(1.0 - overlaps[i] ** 2, 0.0)))
        energies[i] = data.energies[0]
    phases = np.concatenate(
        [[0.0], np.cumsum(0.5 * (energies[1:] + energies[:-1]) * np.diff(t_eval))]
    )
    record = TrajectoryRecord(tau=t_eval, delta=deltas, overlap=overlaps,
                              norm=norms, phase=phases)
    return EvolutionResult(final=states[-1], record=record)


def final_infidelity(cfg: EvolutionConfig, target: np.ndarray | None = None) -> float:
    """Infidelity of the evolved final state against the target.

    The default target is the solved ground state at the end of the path.
    """
    if target is None:
        target = ground_state(cfg.path, cfg.schedule(1.0), k=1,
                              method=cfg.eig_method).states[:, 0]
    result = evolve(replace(cfg, samples=2))
    return instantaneous_infidelity(result.final, target)


def schedule_descriptor(schedule) -> tuple:
    """(kind, n, d) summary columns for sweep tables; n and d may be None."""
    kind = schedule.kind
    n = None
    d = getattr(schedule, "smoothing_width", None)
    if hasattr(schedule, "n"):
        n = schedule.n
    elif hasattr(schedule, "sigma"):
        order = schedule.sigma.order
        n = order if isinstance(order, int) else None
    return kind, n, d


@dataclass(frozen=True)
class SweepRow:
    model: str
    L: int
    schedule_kind: str
    n: int | None
    d: float | None
    T: float
    epsilon: float
    final_infidelity: float | None
    runtime_s: float
    schedule_label: str = ""
    error: str | None = None


def _run_single(path, schedule, T, tolerance, backend, eig_method, target):
    t0 = time.perf_counter()
    cfg = EvolutionConfig(path=path, schedule=schedule, T=T, tolerance=tolerance,
                          samples=2, backend=backend, eig_method=eig_method)
    try:
        value = final_infidelity(cfg, target=target)
        err = None
    except Exception as exc:  # per-run failures must not sink the sweep
        value = None
        err = f"{type(exc).__name__}: {exc}"
    return value, err, time.perf_counter() - t0


def sweep(path: HamiltonianPath, epsilons, schedules, tolerance: float = 1e-12,
          backend: str = "dop853", eig_method: str = "auto",
          target: np.ndarray | None = None, max_workers: int | None = None):
    """Final infidelity for every (schedule, epsilon) combination.

    Runs are independent and executed on a bounded worker pool; rows come
    back in deterministic input order (schedules outer, epsilons inner).
    The target state is solved once and shared by every run.
    """
    epsilons = list(epsilons)
    schedules = list(schedules)
    if not epsilons or not schedules:
        raise DomainError("sweep needs at least one epsilon and one schedule")
    if target is None:
        target = ground_state(path, 1.0, k=1, method=eig_method).states[:, 0]

    jobs = [(sched, eps) for sched in schedules for eps in epsilons]
    if max_workers is None:
        max_workers = os.cpu_count() or 1
    results = []
    if max_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = [
                pool.submit(_run_single, path, sched, 1.0 / eps, tolerance,
                            backend, eig_method, target)
                for sched, eps in jobs
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _run_single(path, sched, 1.0 / eps, tolerance, backend, eig_method, target)
            for sched, eps in jobs
        ]

    desc = path.describe()
    rows = []
    for (sched, eps), (value, err, runtime) in zip(jobs, results):
        kind, n, d = schedule_descriptor(sched)
        rows.append(SweepRow(
            model=desc.get("model", "custom"),
            L=desc.get("L", path.num_sites),
            schedule_kind=kind, n=n, d=d,
            T=1.0 / eps, epsilon=eps,
            final_infidelity=value, runtime_s=runtime,
            schedule_label=sched.label, error=err,
        ))
    return rows


_SWEEP_COLUMNS = ["model", "L", "schedule_kind", "n", "d", "T", "epsilon",
                  "final_infidelity", "runtime_s", "schedule_label", "error"]


def write_sweep_csv(rows, path, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(_SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([
                row.model, row.L, row.schedule_kind,
                "" if row.n is None else row.n,
                "" if row.d is None else repr(float(row.d)),
                repr(float(row.T)), repr(float(row.epsilon)),
                "" if row.final_infidelity is None else repr(float(row.final_infidelity)),
                f"{row.runtime_s:.6f}", row.schedule_label, row.error or "",
            ])


def write_trajectory_csv(record: TrajectoryRecord, path, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["tau", "delta", "overlap", "norm", "phase"])
        for row in zip(record.tau, record.delta, record.overlap,
                       record.norm, record.phase):
            writer.writerow([repr(float(v)) for v in row])
