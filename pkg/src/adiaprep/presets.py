"""Desk-scale figure-reproduction presets.

Each preset bundles the model, schedules, and epsilon grid used by the
corresponding verification experiment; the CLI `preset` subcommand runs them
and the acceptance suite imports the same definitions, so both always agree.

Grid choices: the Ising chain reaches its polynomial regime only below the
exponential shoulder (rate c ~ 0.01 at these sizes), so the scaling presets
extend to eps of a few 1e-4 (total times of a few thousand); deep points use
a 1e-13 integrator tolerance to stay well below the measured infidelities.
"""

from __future__ import annotations

import numpy as np

from .models import IsingSemicirclePath, RydbergEllipticPath, chain_positions
from .schedules import (
    beta_schedule,
    gap_informed_schedule,
    linear_schedule,
    piecewise_schedule,
    sqrt_schedule,
    truncated_cosine,
)
from .spectral import gap_profile

SMOOTHING_WIDTH = 0.1

#: Scaling sweep (final infidelity vs eps) for the smoothed-boundary family.
FIG3_L = 9
FIG3_BETA_EPSILONS = tuple(np.geomspace(0.03, 3.2e-4, 16))
FIG3_SQRT_EPSILONS = tuple(np.geomspace(0.02, 2.5e-4, 18))
FIG3_TOLERANCE = 1e-13

#: Exponential-regime rate extraction for the size-dependence fit.
RATE_SIZES = (7, 9, 11)
RATE_EPSILONS = tuple(np.geomspace(0.05, 0.004, 9))
RATE_TOLERANCE = 1e-11

#: Plain beta ramp vs boundary-smoothed reference (short/long time trade-off).
TRADEOFF_CASES = ((7, tuple(np.geomspace(0.02, 2.2e-4, 12))),
                  (9, tuple(np.geomspace(0.02, 3.2e-4, 12))))
TRADEOFF_TOLERANCE = 1e-13

#: Trajectory comparison (instantaneous infidelity along one run).
FIG2_L = 9
FIG2_T = 1000.0
FIG2_SAMPLES = 201
FIG2_TOLERANCE = 1e-12

#: Noiseless Rydberg chain with the gap-informed reference schedule.
FIG5A_L = 7
FIG5A_SPACING_UM = 5.6
FIG5A_EPSILONS = tuple(np.geomspace(1.0, 0.12, 10))
FIG5A_TOLERANCE = 1e-12
FIG5A_GAP_GRID = 101

PRESET_NAMES = ("fig2-desk", "fig3-desk", "fig4-desk", "fig5a-desk")


def ising_smoothed_family(n_values=(0, 1, 2), d: float = SMOOTHING_WIDTH):
    lin = linear_schedule()
    return [piecewise_schedule(beta_schedule(n), lin, d) for n in n_values]


def fig3_jobs():
    """(path, schedules, epsilons, tolerance) sweep jobs for the scaling figure."""
    path = IsingSemicirclePath(FIG3_L)
    lin = linear_schedule()
    return [
        (path, ising_smoothed_family(), FIG3_BETA_EPSILONS, FIG3_TOLERANCE),
        (path, [sqrt_schedule(lin, SMOOTHING_WIDTH)], FIG3_SQRT_EPSILONS, FIG3_TOLERANCE),
    ]


def rate_jobs():
    return [
        (IsingSemicirclePath(L), ising_smoothed_family(), RATE_EPSILONS, RATE_TOLERANCE)
        for L in RATE_SIZES
    ]


def tradeoff_jobs():
    lin = linear_schedule()
    return [
        (IsingSemicirclePath(L),
         [beta_schedule(1), piecewise_schedule(beta_schedule(1), lin, SMOOTHING_WIDTH)],
         eps, TRADEOFF_TOLERANCE)
        for L, eps in TRADEOFF_CASES
    ]


def fig2_schedules():
    lin = linear_schedule()
    return [lin,
            piecewise_schedule(beta_schedule(1), lin, SMOOTHING_WIDTH),
            beta_schedule(1)]


def rydberg_preset_path():
    return RydbergEllipticPath(chain_positions(FIG5A_L, FIG5A_SPACING_UM),
                               start_ferromagnetic=True)


def fig5a_schedules(path, grid_size: int = FIG5A_GAP_GRID):
    """Reference (gap-informed), smoothed, and sqrt schedules for the Rydberg runs."""
    profile = gap_profile(path, grid_size=grid_size)
    reference = gap_informed_schedule(profile, truncated_cosine, degree=10)
    return [reference,
            piecewise_schedule(beta_schedule(1), reference, SMOOTHING_WIDTH),
            sqrt_schedule(reference, SMOOTHING_WIDTH)]
