"""Boundary-smooth annealing schedules and adiabatic state preparation.

Evolves mixed-field Ising and Rydberg spin chains under schedule functions
with controlled boundary derivatives, and verifies how the final-state
infidelity scales with the inverse evolution time.
"""

from .analysis import (
    RegimeSplit,
    ScalingFit,
    fit_exponential,
    fit_power_law,
    fit_rate_vs_size,
    split_regimes,
)
from .errors import (
    AdiaprepError,
    ConfigError,
    DegenerateGapError,
    DomainError,
    InsufficientSpanError,
    MonotonicityError,
    NoConvergenceError,
    OutOfRangeError,
    ResourceLimitError,
)
from .evolution import (
    EvolutionConfig,
    EvolutionResult,
    SweepRow,
    TrajectoryRecord,
    adiabatic_distance,
    evolve,
    final_infidelity,
    instantaneous_infidelity,
    sweep,
)
from .models import (
    C6_DEFAULT,
    EllipticPathParams,
    IsingParams,
    IsingSemicirclePath,
    MatrixPath,
    RydbergEllipticPath,
    RydbergParams,
    SpinChainOperator,
    chain_positions,
    elliptic_path,
    ising_hamiltonian,
    ket_index,
    neel_ket,
    path_hamiltonian,
    rydberg_hamiltonian,
    semicircle_path,
)
from .schedules import (
    DIVERGING,
    BetaSchedule,
    LinearSchedule,
    PiecewiseSchedule,
    PolynomialSchedule,
    Schedule,
    SqrtSchedule,
    beta_schedule,
    gap_informed_schedule,
    linear_schedule,
    measure_boundary_order,
    piecewise_schedule,
    smooth_transition_inf,
    sqrt_schedule,
    truncated_cosine,
)
from .specfun import elliptic_e, elliptic_e_inv, regularized_incomplete_beta
from .spectral import (
    GapProfile,
    SpectralData,
    first_order_infidelity,
    gamma0,
    gap_profile,
    ground_state,
    lowest_eigenpairs,
)

__version__ = "0.1.0"
