"""Fits of the infidelity scaling regimes.

Small-eps data is fit as a power law delta = A * eps^p (a line in log-log);
large-eps data as an exponential delta = A * exp(-c / eps) (a line in 1/eps
vs log delta).  ``split_regimes`` finds the changepoint between the two, and
``fit_rate_vs_size`` fits the size dependence of the exponential rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, InsufficientSpanError

__all__ = [
    "ScalingFit",
    "RegimeSplit",
    "fit_power_law",
    "fit_exponential",
    "split_regimes",
    "fit_rate_vs_size",
    "NOISE_FLOOR",
]

#: Points with infidelity below this are integrator noise and are excluded.
NOISE_FLOOR = 1e-12

_MIN_POINTS = 4


@dataclass(frozen=True)
class ScalingFit:
    """One fitted regime: delta = prefactor * eps^p or prefactor * exp(-c/eps)."""

    regime: str  # "polynomial" | "exponential"
    exponent_or_rate: float
    prefactor: float
    residual: float  # rms of log residuals
    n_points: int
    eps_min: float
    eps_max: float

    def predict(self, eps):
        eps = np.asarray(eps, dtype=float)
        if self.regime == "polynomial":
            return self.prefactor * eps ** self.exponent_or_rate
        return self.prefactor * np.exp(-self.exponent_or_rate / eps)

    def to_dict(self) -> dict:
        return asdict(self)


def _clean_points(points):
    pts = [(float(e), float(d)) for e, d in points]
    if any(e <= 0 or d <= 0 for e, d in pts):
        raise DomainError("fits need strictly positive (eps, delta) pairs")
    pts = [(e, d) for e, d in pts if d > NOISE_FLOOR]
    if len(pts) < _MIN_POINTS:
        raise DomainError(
            f"need at least {_MIN_POINTS} points above the noise floor; got {len(pts)}"
        )
    pts.sort()
    return np.asarray(pts)


def _line_fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def fit_power_law(points) -> ScalingFit:
    """Least-squares line in (log eps, log delta); the slope is the exponent."""
    pts = _clean_points(points)
    slope, intercept, rms = _line_fit(np.log(pts[:, 0]), np.log(pts[:, 1]))
    return ScalingFit(regime="polynomial", exponent_or_rate=slope,
                      prefactor=math.exp(intercept), residual=rms,
                      n_points=len(pts), eps_min=float(pts[0, 0]),
                      eps_max=float(pts[-1, 0]))


def fit_exponential(points) -> ScalingFit:
    """Least-squares line in (1/eps, log delta); the rate is c = -slope."""
    pts = _clean_points(points)
    slope, intercept, rms = _line_fit(1.0 / pts[:, 0], np.log(pts[:, 1]))
    return ScalingFit(regime="exponential", exponent_or_rate=-slope,
                      prefactor=math.exp(intercept), residual=rms,
                      n_points=len(pts), eps_min=float(pts[0, 0]),
                      eps_max=float(pts[-1, 0]))


@dataclass(frozen=True)
class RegimeSplit:
    """Changepoint between the exponential (large eps) and polynomial (small
    eps) regimes, with the per-side fits."""

    polynomial_points: np.ndarray
    exponential_points: np.ndarray
    crossover_eps: float
    polynomial_fit: ScalingFit
    exponential_fit: ScalingFit
    combined_residual: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "crossover_eps": self.crossover_eps,
            "degenerate": self.degenerate,
            "combined_residual": self.combined_residual,
            "polynomial_fit": self.polynomial_fit.to_dict(),
            "exponential_fit": self.exponential_fit.to_dict(),
        }


def split_regimes(points) -> RegimeSplit:
    """Best two-regime split of an (eps, delta) sweep.

    Tries every changepoint that leaves at least 4 points per side, fits the
    small-eps side as a power law and the large-eps side as an exponential,
    and keeps the split minimizing the combined rms log residual.  Input
    order does not matter.  Requires >= 8 points spanning >= 1.5 decades.
    """
    pts = _clean_points(points)
    if len(pts) < 2 * _MIN_POINTS:
        raise InsufficientSpanError(
            f"regime split needs at least {2 * _MIN_POINTS} points; got {len(pts)}"
        )
    span = math.log10(pts[-1, 0] / pts[0, 0])
    if span < 1.5:
        raise InsufficientSpanError(
            f"regime split needs >= 1.5 decades in eps; got {span:.2f}"
        )

    best = None
    for cut in range(_MIN_POINTS, len(pts) - _MIN_POINTS + 1):
        poly_side, exp_side = pts[:cut], pts[cut:]
        pfit = fit_power_law(poly_side)
        efit = fit_exponential(exp_side)
        sse = (pfit.residual ** 2 * pfit.n_points
               + efit.residual ** 2 * efit.n_points)
        combined = math.sqrt(sse / len(pts))
        if best is None or combined < best[0]:
            best = (combined, cut, pfit, efit)

    combined, cut, pfit, efit = best
    crossover = math.sqrt(pts[cut - 1, 0] * pts[cut, 0])
    degenerate = cut == _MIN_POINTS or cut == len(pts) - _MIN_POINTS
    return RegimeSplit(
        polynomial_points=pts[:cut], exponential_points=pts[cut:],
        crossover_eps=crossover, polynomial_fit=pfit, exponential_fit=efit,
        combined_residual=combined, degenerate=degenerate,
    )


def fit_rate_vs_size(rates) -> tuple[float, float]:
    """Power law c = amplitude * L^exponent through (L, c) samples."""
    pts = [(float(L), float(c)) for L, c in rates]
    if len(pts) < 3:
        raise DomainError(f"size fit needs at least 3 sizes; got {len(pts)}")
    if any(L <= 0 or c <= 0 for L, c in pts):
        raise DomainError("size fit needs positive sizes and rates")
    arr = np.asarray(sorted(pts))
    slope, intercept, _ = _line_fit(np.log(arr[:, 0]), np.log(arr[:, 1]))
    return math.exp(intercept), slope
