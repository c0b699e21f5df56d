"""Special functions backing schedule and path constructions.

Provides the regularized incomplete beta function, the incomplete elliptic
integral of the second kind E(phi, m) for any parameter m <= 1 (negative m
included), and the inverse of E in phi.  Accuracy contract: absolute error
below 1e-12 against direct quadrature of the defining integrals.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError, NoConvergenceError, OutOfRangeError

__all__ = [
    "as_unit_interval",
    "regularized_incomplete_beta",
    "elliptic_e",
    "elliptic_e_inv",
]

#: Slack allowed when validating unit-interval arguments, so that values
#: produced by floating-point stepping (e.g. 1 + 1e-16) are accepted.
_UNIT_SLACK = 1e-9


def as_unit_interval(x, name: str = "x"):
    """Validate that ``x`` lies in [0, 1] and clamp float fuzz at the ends.

    Accepts scalars or arrays; raises :class:`DomainError` for violations
    beyond a 1e-9 slack.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < -_UNIT_SLACK) or np.any(arr > 1.0 + _UNIT_SLACK):
        bad = arr[(arr < -_UNIT_SLACK) | (arr > 1.0 + _UNIT_SLACK)]
        raise DomainError(f"{name} must lie in [0, 1]; got {bad.flat[0]!r}")
    clipped = np.clip(arr, 0.0, 1.0)
    if np.isscalar(x) or arr.ndim == 0:
        return float(clipped)
    return clipped


def regularized_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete beta function B(x; a, b).

    B(x; a, b) = int_0^x t^(a-1) (1-t)^(b-1) dt / int_0^1 t^(a-1) (1-t)^(b-1) dt.

    Monotone nondecreasing in x, with B(0)=0 and B(1)=1.  Accepts scalar or
    array ``x`` in [0, 1]; requires a > 0 and b > 0.
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"beta parameters must be positive; got a={a}, b={b}")
    xv = as_unit_interval(x)
    return special.betainc(a, b, xv)


def _elliptic_integrand_ok(phi: float, m: float) -> bool:
    """Whether 1 - m sin^2 t stays nonnegative for all t in [0, phi]."""
    if m <= 1.0:
        return True
    max_sin2 = 1.0 if phi >= math.pi / 2 else math.sin(phi) ** 2
    return m * max_sin2 <= 1.0


def elliptic_e(phi, m: float):
    """Incomplete elliptic integral of the second kind.

    E(phi, m) = int_0^phi sqrt(1 - m sin^2 t) dt, for phi >= 0 and m <= 1.
    Negative parameters m are fully supported (the integrand then exceeds 1).
    """
    scalar = np.isscalar(phi)
    phis = np.atleast_1d(np.asarray(phi, dtype=float))
    if np.any(phis < 0):
        raise DomainError(f"phi must be nonnegative; got {phis.min()}")
    if m > 1.0:
        # Only legal while the integrand stays real on [0, phi].
        if not all(_elliptic_integrand_ok(p, m) for p in phis):
            raise DomainError(
                f"integrand 1 - m sin^2 t turns negative on [0, phi] for m={m}"
            )
        nodes, weights = np.polynomial.legendre.leggauss(80)
        out = np.empty_like(phis)
        for i, p in enumerate(phis):
            t = 0.5 * p * (nodes + 1.0)
            out[i] = 0.5 * p * np.dot(weights, np.sqrt(1.0 - m * np.sin(t) ** 2))
    else:
        out = special.ellipeinc(phis, m)
    return float(out[0]) if scalar else out


def _elliptic_e_derivative(phi: float, m: float) -> float:
    return math.sqrt(max(1.0 - m * math.sin(phi) ** 2, 0.0))


def elliptic_e_inv(u: float, m: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    """Inverse of ``elliptic_e`` in its first argument on [0, pi].

    Returns phi such that E(phi, m) = u, solved by bisection refined with
    Newton steps on the strictly increasing E(., m).  Raises
    :class:`OutOfRangeError` if u is outside [0, E(pi, m)] and
    :class:`NoConvergenceError` after ``max_iter`` iterations.
    """
    if m > 1.0:
        raise DomainError(f"inverse requires m <= 1; got m={m}")
    u = float(u)
    if u < -_UNIT_SLACK:
        raise OutOfRangeError(f"u must be nonnegative; got {u}")
    u_max = elliptic_e(math.pi, m)
    if u > u_max * (1.0 + 1e-12) + 1e-12:
        raise OutOfRangeError(f"u={u} exceeds E(pi, m)={u_max}")
    u = min(max(u, 0.0), u_max)

    lo, hi = 0.0, math.pi
    phi = u * math.pi / u_max if u_max > 0 else 0.0
    for _ in range(max_iter):
        r = elliptic_e(phi, m) - u
        if abs(r) <= tol * max(1.0, abs(u)):
            return phi
        if r > 0:
            hi = phi
        else:
            lo = phi
        d = _elliptic_e_derivative(phi, m)
        if d > 0:
            step = phi - r / d
        else:
            step = 0.5 * (lo + hi)
        # Fall back to bisection whenever Newton leaves the bracket.
        phi = step if lo < step < hi else 0.5 * (lo + hi)
    raise NoConvergenceError(
        f"elliptic_e_inv did not converge for u={u}, m={m} after {max_iter} iterations"
    )
