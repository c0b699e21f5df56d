"""Schedule functions s: [0,1] -> [0,1] with controlled boundary derivatives.

A schedule reparametrizes a fixed Hamiltonian path in time.  The boundary
behavior (how many derivatives vanish at the endpoints, or whether the
derivative diverges there) controls the end-to-end preparation error, so
every schedule here carries a declared boundary order that can be verified
numerically with :func:`measure_boundary_order`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, MonotonicityError, NoConvergenceError
from .specfun import as_unit_interval, regularized_incomplete_beta

__all__ = [
    "DIVERGING",
    "INFINITE",
    "Schedule",
    "LinearSchedule",
    "BetaSchedule",
    "PiecewiseSchedule",
    "SqrtSchedule",
    "PolynomialSchedule",
    "linear_schedule",
    "beta_schedule",
    "piecewise_schedule",
    "sqrt_schedule",
    "smooth_transition_inf",
    "truncated_cosine",
    "gap_informed_schedule",
    "measure_boundary_order",
    "schedule_table",
    "write_schedule_csv",
]

#: Declared order of schedules whose derivative blows up at the boundary.
DIVERGING = "diverging"
#: Declared order of transitions with all derivatives vanishing (C-infinity).
INFINITE = "infinite"

_FD_STEP = 1e-6


class Schedule:
    """Base class: a monotone map of [0, 1] onto itself.

    Subclasses set ``kind`` and ``order`` and implement ``_evaluate`` on a
    clipped float array.  Instances are immutable and safe to share.
    """

    kind: str = "abstract"
    order: int | str = 0

    def __call__(self, x):
        xv = as_unit_interval(x, name="schedule argument")
        arr = np.atleast_1d(np.asarray(xv, dtype=float))
        out = self._evaluate(arr)
        if np.isscalar(xv):
            return float(out[0])
        return out

    def _evaluate(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def scalar(self, x: float) -> float:
        """Fast scalar evaluation without array wrapping (inner-loop path).

        Assumes 0 <= x <= 1; subclasses override with closed-form branches.
        """
        return float(self._evaluate(np.asarray([x]))[0])

    def derivative(self, x):
        """ds/dx by central differences (one-sided within _FD_STEP of the ends)."""
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        h = _FD_STEP
        lo = np.clip(arr - h, 0.0, 1.0)
        hi = np.clip(arr + h, 0.0, 1.0)
        out = (self(hi) - self(lo)) / (hi - lo)
        if np.isscalar(x):
            return float(np.atleast_1d(out)[0])
        return out

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class LinearSchedule(Schedule):
    """The identity ramp s(x) = x."""

    kind = "linear"
    order = 0

    def _evaluate(self, arr):
        return arr.copy()

    def scalar(self, x):
        return x

    def derivative(self, x):
        return np.ones_like(np.asarray(x, dtype=float)) if not np.isscalar(x) else 1.0


@dataclass(frozen=True)
class BetaSchedule(Schedule):
    """Symmetric regularized-incomplete-beta ramp with n flat derivatives.

    s(x) = B(x; n+1, n+1); the first n derivatives vanish at both endpoints
    and ds/dx = x^n (1-x)^n / B(n+1, n+1) peaks at x = 1/2.
    """

    n: int

    kind = "beta"

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise DomainError(f"beta ramp requires integer n >= 0; got {self.n}")

    @property
    def order(self) -> int:
        return self.n

    def _evaluate(self, arr):
        return np.atleast_1d(regularized_incomplete_beta(arr, self.n + 1, self.n + 1))

    def scalar(self, x):
        return float(special.betainc(self.n + 1, self.n + 1, x))

    def derivative(self, x):
        arr = np.asarray(x, dtype=float)
        norm = special.beta(self.n + 1, self.n + 1)
        out = (arr ** self.n) * ((1.0 - arr) ** self.n) / norm
        return float(out) if np.isscalar(x) else out

    @property
    def label(self) -> str:
        return f"beta{self.n}"


@dataclass(frozen=True)
class PiecewiseSchedule(Schedule):
    """Reference schedule with smoothed ends of a prescribed boundary order.

    Equals the reference ``f`` on [d, 1-d].  On [0, d] it blends, with weight
    sigma(x/d), between a squeezed copy of the smoothing ramp,
    f(d) * sigma(x/d), and f itself; the mirrored blend is applied on
    [1-d, 1].  With sigma of boundary order n the result is C^n at the
    joints, has exactly n vanishing derivatives at both endpoints (its
    (n+1)-th boundary derivative is that of the squeezed ramp, so it grows
    like d^-n relative to sigma's own), and reduces to f when sigma is the
    identity.
    """

    sigma: Schedule
    reference: Schedule
    d: float

    kind = "piecewise_beta"

    def __post_init__(self):
        if not (0.0 < self.d < 0.5):
            raise DomainError(f"smoothing width must satisfy 0 < d < 0.5; got {self.d}")

    @property
    def order(self):
        return self.sigma.order

    @property
    def smoothing_width(self) -> float:
        return self.d

    def _evaluate(self, arr):
        d = self.d
        f = self.reference
        out = np.asarray(f(arr), dtype=float).copy()
        left = arr < d
        right = arr > 1.0 - d
        if np.any(left):
            x = arr[left]
            a = np.asarray(self.sigma(x / d))
            out[left] = (1.0 - a) * (f(d) * a) + a * f(x)
        if np.any(right):
            x = arr[right]
            w = np.asarray(self.sigma((x - 1.0 + d) / d))
            ramp = 1.0 - (1.0 - f(1.0 - d)) * np.asarray(self.sigma((1.0 - x) / d))
            out[right] = w * ramp + (1.0 - w) * f(x)
        return out

    def scalar(self, x):
        d = self.d
        f = self.reference
        if x < d:
            a = self.sigma.scalar(x / d)
            return (1.0 - a) * (f.scalar(d) * a) + a * f.scalar(x)
        if x > 1.0 - d:
            w = self.sigma.scalar((x - 1.0 + d) / d)
            ramp = 1.0 - (1.0 - f.scalar(1.0 - d)) * self.sigma.scalar((1.0 - x) / d)
            return w * ramp + (1.0 - w) * f.scalar(x)
        return f.scalar(x)

    @property
    def label(self) -> str:
        return f"s_{self.sigma.label}_{self.reference.label}_d{self.d:g}"


def _transition_bump(arr: np.ndarray) -> np.ndarray:
    """exp(-1/y) continued by 0 at y <= 0."""
    out = np.zeros_like(arr)
    pos = arr > 0
    out[pos] = np.exp(-1.0 / arr[pos])
    return out


def _bump_scalar(x: float) -> float:
    hx = math.exp(-1.0 / x) if x > 0 else 0.0
    h1 = math.exp(-1.0 / (1.0 - x)) if x < 1 else 0.0
    return hx / (hx + h1)


def smooth_transition_inf(x):
    """C-infinity transition: 0 -> 1 on [0, 1] with all derivatives flat at the ends.

    sigma(x) = h(x) / (h(x) + h(1-x)) with h(y) = exp(-1/y) for y > 0, else 0.
    Symmetric about x = 1/2.
    """
    xv = as_unit_interval(x)
    arr = np.atleast_1d(np.asarray(xv, dtype=float))
    hx = _transition_bump(arr)
    h1 = _transition_bump(1.0 - arr)
    out = hx / (hx + h1)
    return float(out[0]) if np.isscalar(xv) else out


@dataclass(frozen=True)
class SqrtSchedule(Schedule):
    """Schedule with square-root onset, hence diverging boundary derivatives.

    On [0, 2d]:   (1 - w) * d*sqrt(x/d) + w * f(x),  w = smooth_transition_inf(x/(2d))
    on [2d, 1-2d]: f(x)
    on [1-2d, 1]:  w * (1 - d*sqrt((1-x)/d)) + (1 - w) * f(x),
                   w = smooth_transition_inf((x-1+2d)/(2d)).

    The C-infinity blend weight makes the joins smooth at 2d and 1-2d while
    ds/dx ~ x^(-1/2) at 0 (mirrored at 1).  Requires d <= 0.25.
    """

    reference: Schedule
    d: float

    kind = "sqrt"
    order = DIVERGING

    def __post_init__(self):
        if not (0.0 < self.d <= 0.25):
            raise DomainError(f"sqrt schedule requires 0 < d <= 0.25; got {self.d}")

    @property
    def smoothing_width(self) -> float:
        return self.d

    def _evaluate(self, arr):
        d = self.d
        f = self.reference
        out = np.asarray(f(arr), dtype=float).copy()
        left = arr < 2.0 * d
        right = (arr > 1.0 - 2.0 * d) & ~left
        if np.any(left):
            x = arr[left]
            w = np.asarray(smooth_transition_inf(x / (2.0 * d)))
            out[left] = (1.0 - w) * d * np.sqrt(x / d) + w * f(x)
        if np.any(right):
            x = arr[right]
            w = np.asarray(smooth_transition_inf((x - 1.0 + 2.0 * d) / (2.0 * d)))
            out[right] = w * (1.0 - d * np.sqrt((1.0 - x) / d)) + (1.0 - w) * f(x)
        return out

    def scalar(self, x):
        d = self.d
        f = self.reference
        if x < 2.0 * d:
            w = _bump_scalar(x / (2.0 * d))
            return (1.0 - w) * d * math.sqrt(x / d) + w * f.scalar(x)
        if x > 1.0 - 2.0 * d:
            w = _bump_scalar((x - 1.0 + 2.0 * d) / (2.0 * d))
            return w * (1.0 - d * math.sqrt((1.0 - x) / d)) + (1.0 - w) * f.scalar(x)
        return f.scalar(x)

    @property
    def label(self) -> str:
        return f"sqrt_{self.reference.label}_d{self.d:g}"


def truncated_cosine(x):
    """Target speed profile g(x) = (1.5*pi*x + cos(pi*x) - 1) / (1.5*pi - 2).

    Monotone from g(0) = 0 to g(1) = 1 with its slowest growth in the middle.
    """
    xv = as_unit_interval(x)
    arr = np.atleast_1d(np.asarray(xv, dtype=float))
    out = (1.5 * np.pi * arr + np.cos(np.pi * arr) - 1.0) / (1.5 * np.pi - 2.0)
    return float(out[0]) if np.isscalar(xv) else out


@dataclass(frozen=True)
class PolynomialSchedule(Schedule):
    """Schedule given by a fitted polynomial, endpoints pinned to 0 and 1.

    ``coefficients`` are in increasing-power order.  Used for gap-informed
    schedules; generically has nonvanishing boundary derivatives (order 0).
    """

    coefficients: tuple
    fit_residual: float = 0.0
    kind = "gap_informed"
    order = 0

    def _evaluate(self, arr):
        out = np.polynomial.polynomial.polyval(arr, np.asarray(self.coefficients))
        out = np.asarray(out, dtype=float).copy()
        out[arr == 0.0] = 0.0
        out[arr == 1.0] = 1.0
        return out

    def scalar(self, x):
        if x == 0.0:
            return 0.0
        if x == 1.0:
            return 1.0
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self, x):
        c = np.asarray(self.coefficients)
        dc = c[1:] * np.arange(1, len(c))
        out = np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), dc)
        return float(out) if np.isscalar(x) else out

    @property
    def label(self) -> str:
        return f"gap_informed_deg{len(self.coefficients) - 1}"

    def coefficients_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "coefficients": list(self.coefficients),
             "fit_residual": self.fit_residual},
            indent=2,
        )


def linear_schedule() -> LinearSchedule:
    """Identity ramp; the reference schedule with boundary order 0."""
    return LinearSchedule()


def beta_schedule(n: int) -> BetaSchedule:
    """Beta ramp B(x; n+1, n+1) with n vanishing derivatives at both ends."""
    return BetaSchedule(n=int(n))


def piecewise_schedule(sigma: Schedule, f: Schedule, d: float) -> PiecewiseSchedule:
    """Smooth the ends of reference ``f`` to the boundary order of ``sigma``.

    The result equals ``f`` exactly on [d, 1-d].
    """
    return PiecewiseSchedule(sigma=sigma, reference=f, d=float(d))


def sqrt_schedule(f: Schedule, d: float = 0.1) -> SqrtSchedule:
    """Attach square-root (diverging-derivative) onsets to reference ``f``."""
    return SqrtSchedule(reference=f, d=float(d))


def _rk4_reparam(gap_fn, g_half, c: float, n_steps: int) -> np.ndarray:
    """Fixed-step RK4 for ds/dx = c * g(x) * gap(s), s(0) = 0.

    ``g_half`` holds g on the half-step grid (2*n_steps + 1 values).  The gap
    is evaluated with s clamped to [0, 1] since stages may overshoot.
    """
    h = 1.0 / n_steps
    s = 0.0
    out = np.empty(n_steps + 1)
    out[0] = 0.0

    def rhs(gval, sval):
        return c * gval * gap_fn(min(max(sval, 0.0), 1.0))

    for i in range(n_steps):
        g0 = g_half[2 * i]
        gm = g_half[2 * i + 1]
        g1 = g_half[2 * i + 2]
        k1 = rhs(g0, s)
        k2 = rhs(gm, s + 0.5 * h * k1)
        k3 = rhs(gm, s + 0.5 * h * k2)
        k4 = rhs(g1, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = s
    return out


def gap_informed_schedule(
    gap,
    g=truncated_cosine,
    degree: int = 10,
    ode_steps: int = 10_000,
    fit_points: int = 1000,
    shoot_tol: float = 1e-8,
    max_iter: int = 200,
) -> PolynomialSchedule:
    """Schedule that slows down where the spectral gap is small.

    Solves ds/dx = c * g(x) * gap(s(x)) with s(0) = 0, choosing the rate
    constant c by bracketing + bisection so that s(1) = 1 within
    ``shoot_tol``.  A degree-``degree`` polynomial is then least-squares
    fitted to the solution on a uniform grid, rescaled affinely to exact
    endpoints, and returned as the schedule.

    ``gap`` must be positive on [0, 1]; ``g`` nonnegative and not
    identically zero.  Raises :class:`MonotonicityError` if the fitted
    polynomial decreases anywhere on the evaluation grid.
    """
    probe = np.linspace(0.0, 1.0, 101)
    gap_vals = np.asarray([gap(s) for s in probe], dtype=float)
    if np.any(gap_vals <= 0.0):
        raise DomainError("gap profile must be strictly positive on [0, 1]")
    g_probe = np.asarray(g(probe), dtype=float)
    if np.any(g_probe < -1e-12) or not np.any(g_probe > 0.0):
        raise DomainError("target profile g must be nonnegative and not identically zero")

    x_half = np.linspace(0.0, 1.0, 2 * ode_steps + 1)
    g_half = np.asarray(g(x_half), dtype=float)

    def endpoint(c):
        return _rk4_reparam(gap, g_half, c, ode_steps)[-1]

    # Bracket the rate constant, then bisect; s(1) is increasing in c.
    c_hi = 1.0 / max(np.trapezoid(g_half * np.interp(x_half, probe, gap_vals), x_half), 1e-300)
    for _ in range(max_iter):
        if endpoint(c_hi) >= 1.0:
            break
        c_hi *= 2.0
    else:
        raise NoConvergenceError("could not bracket the normalization constant")
    c_lo = 0.0
    c = c_hi
    for _ in range(max_iter):
        c = 0.5 * (c_lo + c_hi)
        s1 = endpoint(c)
        if abs(s1 - 1.0) <= shoot_tol:
            break
        if s1 > 1.0:
            c_hi = c
        else:
            c_lo = c
    else:
        raise NoConvergenceError(
            f"shooting for the normalization constant stalled at |s(1)-1|={abs(s1 - 1.0):.2e}"
        )

    solution = _rk4_reparam(gap, g_half, c, ode_steps)
    stride = max(ode_steps // (fit_points - 1), 1)
    x_fit = np.linspace(0.0, 1.0, ode_steps + 1)[::stride]
    s_fit = solution[::stride]
    poly = np.polynomial.Polynomial.fit(x_fit, s_fit, degree).convert()
    coef = poly.coef
    p0 = np.polynomial.polynomial.polyval(0.0, coef)
    p1 = np.polynomial.polynomial.polyval(1.0, coef)
    coef = coef / (p1 - p0)
    coef[0] -= p0 / (p1 - p0)
    residual = float(np.sqrt(np.mean(
        (np.polynomial.polynomial.polyval(x_fit, coef) - (s_fit - p0) / (p1 - p0)) ** 2
    )))

    schedule = PolynomialSchedule(coefficients=tuple(coef), fit_residual=residual)
    grid = np.linspace(0.0, 1.0, 10_001)
    values = schedule(grid)
    drops = np.diff(values)
    if np.any(drops < -1e-12):
        worst = grid[np.argmin(drops)]
        raise MonotonicityError(
            f"fitted degree-{degree} schedule decreases near x={worst:.4f}; "
            "raise the degree or smooth the gap table"
        )
    return schedule


def _boundary_samples(schedule, side: str, h0: float, levels: int):
    """Distances h and boundary increments: s(h) at the left, 1 - s(1-h) at the right."""
    hs = h0 * 0.5 ** np.arange(levels + 1)
    if side == "left":
        vals = np.asarray([schedule(h) for h in hs], dtype=float)
    else:
        vals = np.asarray([1.0 - schedule(1.0 - h) for h in hs], dtype=float)
    return hs, vals


def _boundary_exponent(hs, vals, tol):
    """Leading power p of the boundary increment, or None if unresolvable.

    Uses log2 ratios of one-sided increments on successive halvings, keeping
    only samples large enough to be trusted, and extrapolates the ratio
    sequence to h -> 0 (the correction is linear in h).
    """
    floor = max(1e-13, tol * 1e-7)
    clean = (vals > floor) & (vals < 0.05)
    ps = []
    for i in range(len(hs) - 1):
        if clean[i] and clean[i + 1]:
            ps.append(math.log2(vals[i] / vals[i + 1]))
    if len(ps) < 2:
        return None
    # Ratios computed at smaller h are closer to the true exponent.
    p_ext = 2.0 * ps[-1] - ps[-2]
    p_med = float(np.median(ps[-4:]))
    return p_ext if abs(p_ext - p_med) < 0.2 else p_med


def measure_boundary_order(schedule, tol: float = 1e-6, h0: float | None = None,
                           levels: int = 20):
    """Measured number of vanishing boundary derivatives, or ``DIVERGING``.

    Probes the schedule with one-sided finite differences on a dyadic ladder
    of offsets from both endpoints.  If the first difference quotient grows
    without bound as the offset shrinks the schedule is classified as
    ``DIVERGING``; otherwise the local exponent p of s near the boundary is
    estimated (with extrapolation of the halving ratios to zero offset) and
    derivatives 1 .. p-1 are reported as vanishing.  ``tol`` sets the floor
    below which boundary increments are treated as numerically zero.
    """
    if h0 is None:
        width = getattr(schedule, "smoothing_width", None)
        h0 = min(1e-2, width / 4.0) if width else 1e-2

    orders = []
    for side in ("left", "right"):
        hs, vals = _boundary_samples(schedule, side, h0, levels)
        quotients = vals / hs
        positive = quotients[quotients > 0]
        if len(positive) >= 6:
            growth = positive[-1] / positive[0]
            increasing = np.mean(np.diff(positive) > 0)
            if growth > 10.0 and increasing > 0.7:
                return DIVERGING
        p = _boundary_exponent(hs, vals, tol)
        if p is None:
            orders.append(0)
            continue
        if p < 0.75:
            return DIVERGING
        nearest = round(p)
        if abs(p - nearest) <= 0.25:
            orders.append(max(int(nearest) - 1, 0))
        else:
            orders.append(max(int(math.floor(p + 0.25)) - 1, 0))
    return min(orders)


def schedule_table(schedule, n_points: int = 1001):
    """Columns (x, s(x), ds/dx) on a uniform grid."""
    x = np.linspace(0.0, 1.0, n_points)
    return x, schedule(x), schedule.derivative(x)


def write_schedule_csv(schedule, path, n_points: int = 1001, header_lines=()):
    """Write the (x, s, ds_dx) table; ``header_lines`` become '#' comments."""
    x, s, ds = schedule_table(schedule, n_points)
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["x", "s", "ds_dx"])
        for row in zip(x, s, ds):
            writer.writerow([repr(float(v)) for v in row])
