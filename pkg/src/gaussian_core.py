"""
Closed-form displaced-parity correlation and Wigner function of the two-mode squeezed vacuum.

The correlation of the product of displaced parity operators is

    Pi(alpha; beta) = exp[-2 cosh2r (|alpha|^2 + |beta|^2) + 2 sinh2r (alpha beta + alpha* beta*)]

Writing cosh2r and sinh2r through e^{2r} and e^{-2r} gives the equivalent form

    ln Pi = -e^{2r} |alpha - beta*|^2 - e^{-2r} |alpha + beta*|^2

which is a sum of two non-positive terms: no cancellation and no overflow of cosh2r.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from pydantic import ValidationError

from .errors import InvalidArgumentError
from .models import PhasePoint, SqueezeParam

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

WIGNER_SCALE = 4.0 / math.pi**2

# exp() of larger arguments overflows a double
_EXP_SAFE = 700.0


def coerce_squeezing(r: SqueezeParam | float) -> float:
    """Return r as a validated float (finite, >= 0)"""
    if isinstance(r, SqueezeParam):
        return r.r
    try:
        return SqueezeParam(r=r).r
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid squeezing parameter r={r!r}: {e.errors()[0]['msg']}")


def coerce_point(point: PhasePoint | complex | float) -> complex:
    """Return a phase-space point as a validated finite complex number"""
    if isinstance(point, PhasePoint):
        return point.to_complex()
    try:
        value = complex(point)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"Phase-space point must be complex, got {point!r}")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidArgumentError(f"Phase-space point must be finite, got {point!r}")
    return value


def scaled_weight(two_r: float, weight: ArrayLike) -> np.ndarray:
    """e^{two_r} * weight for weight >= 0, via the log domain once e^{two_r} would overflow"""
    weight = np.asarray(weight, dtype=float)
    if abs(two_r) < _EXP_SAFE:
        return math.exp(two_r) * weight
    # Zero weights stay exactly zero even when two_r itself is infinite
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return np.where(weight == 0.0, 0.0, np.exp(two_r + np.log(weight)))


def log_parity_kernel(r: float, alpha: ArrayLike, beta: ArrayLike) -> np.ndarray:
    """
    Vectorised exponent of Pi(alpha; beta) for validated r and complex arrays of amplitudes

    alpha and beta broadcast against each other.
    """
    alpha = np.asarray(alpha, dtype=complex)
    beta_conj = np.conj(np.asarray(beta, dtype=complex))
    diff = alpha - beta_conj
    total = alpha + beta_conj
    squeezed = diff.real**2 + diff.imag**2
    antisqueezed = total.real**2 + total.imag**2
    return -(scaled_weight(2.0 * r, squeezed) + scaled_weight(-2.0 * r, antisqueezed))


def wigner_kernel(r: float, alpha: ArrayLike, beta: ArrayLike) -> np.ndarray:
    """Vectorised W(alpha; beta) = (4/pi^2) Pi(alpha; beta)"""
    return WIGNER_SCALE * np.exp(log_parity_kernel(r, alpha, beta))


def log_parity_correlation(r: SqueezeParam | float, alpha: PhasePoint | complex, beta: PhasePoint | complex) -> float:
    """
    Exponent E of the displaced-parity correlation, Pi = exp(E), E <= 0

    Stays finite where Pi itself underflows; use it wherever precision at large r matters.

    Raises:
        InvalidArgumentError: negative or non-finite r, non-finite amplitudes
    """
    r_value = coerce_squeezing(r)
    return float(log_parity_kernel(r_value, coerce_point(alpha), coerce_point(beta)))


def parity_correlation(r: SqueezeParam | float, alpha: PhasePoint | complex, beta: PhasePoint | complex) -> float:
    """
    Expectation of D1(a)(-1)^n1 D1+(a) (x) D2(b)(-1)^n2 D2+(b) in the two-mode squeezed vacuum

    Returns a value in (0, 1]; exactly 1 at alpha = beta = 0. May underflow to 0 for very
    large exponents, see log_parity_correlation.
    """
    return math.exp(log_parity_correlation(r, alpha, beta))


def wigner(r: SqueezeParam | float, alpha: PhasePoint | complex, beta: PhasePoint | complex) -> float:
    """Joint Wigner function W(alpha; beta) = (4/pi^2) Pi(alpha; beta), strictly positive"""
    return WIGNER_SCALE * parity_correlation(r, alpha, beta)
