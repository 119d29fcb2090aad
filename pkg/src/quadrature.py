"""Gauss-Hermite normalization check of the two-mode Wigner function."""

import logging
import math

import numpy as np

from .errors import InvalidArgumentError
from .gaussian_core import coerce_squeezing, wigner_kernel
from .models import SqueezeParam

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 40
CARTESIAN_ORDER = 48
CARTESIAN_MAX_R = 0.5


def hermgauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for int exp(-y^2) f(y) dy"""
    if order < 1:
        raise ValueError("Gauss-Hermite order must be >= 1")
    return np.polynomial.hermite.hermgauss(order)


def _principal_to_phase_space(r: float, y: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Map unit-Gaussian coordinates onto (alpha, beta)

    y = (y1, y2) spans the squeezed directions of |alpha - beta*|, z = (z1, z2) the
    anti-squeezed directions of |alpha + beta*|; in these coordinates ln Pi = -|y|^2 - |z|^2.
    """
    s_scale = 1.0 / math.sqrt(2.0 * math.exp(2.0 * r))
    t_scale = 1.0 / math.sqrt(2.0 * math.exp(-2.0 * r))
    s1, s2 = y[0] * s_scale, y[1] * s_scale
    t1, t2 = z[0] * t_scale, z[1] * t_scale
    root2 = math.sqrt(2.0)
    alpha = ((s1 + t1) + 1j * (s2 + t2)) / root2
    beta = ((t1 - s1) + 1j * (s2 - t2)) / root2
    return alpha, beta


def wigner_normalization(r: SqueezeParam | float, order: int = DEFAULT_ORDER) -> float:
    """
    Integral of W(alpha; beta) over (Re alpha, Im alpha, Re beta, Im beta)

    Tensor-product Gauss-Hermite quadrature in the state's principal axes, after absorbing the
    Gaussian weight. Evaluated slice by slice over the first axis to bound memory at order^3 points.
    Intended for r <= 1.5 where the rule is well conditioned.
    """
    r_value = coerce_squeezing(r)
    nodes, weights = hermgauss(order)
    # Jacobian: orthogonal rotation times 1 / (2 e^{2r} * 2 e^{-2r})
    jacobian = 0.25
    y2, z1, z2 = np.meshgrid(nodes, nodes, nodes, indexing="ij")
    w_rest = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    total = 0.0
    for y1, w1 in zip(nodes, weights, strict=True):
        alpha, beta = _principal_to_phase_space(r_value, (np.full_like(y2, y1), y2), (z1, z2))
        radius2 = y1 * y1 + y2 * y2 + z1 * z1 + z2 * z2
        integrand = wigner_kernel(r_value, alpha, beta) * np.exp(radius2)
        total += w1 * float(np.sum(w_rest * integrand))
    result = jacobian * total
    logger.debug(f"📐 Wigner normalization r={r_value} order={order}: {result!r}")
    return result


def wigner_normalization_cartesian(r: SqueezeParam | float, order: int = CARTESIAN_ORDER) -> float:
    """
    Integral of W over the raw (Re alpha, Im alpha, Re beta, Im beta) grid, weight exp(-|x|^2)

    The weight is fixed, so the rule knows nothing of the squeezed directions and checks the
    Gaussian form of W independently. W e^{|x|^2} stays square-integrable against the weight
    only for r < ln2, hence the CARTESIAN_MAX_R limit.

    Raises:
        InvalidArgumentError: invalid r or r > CARTESIAN_MAX_R
    """
    r_value = coerce_squeezing(r)
    if r_value > CARTESIAN_MAX_R:
        raise InvalidArgumentError(f"Cartesian normalization needs r <= {CARTESIAN_MAX_R}, got {r_value}")
    nodes, weights = hermgauss(order)
    im_a, re_b, im_b = np.meshgrid(nodes, nodes, nodes, indexing="ij")
    w_rest = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    beta = re_b + 1j * im_b
    total = 0.0
    for re_a, w1 in zip(nodes, weights, strict=True):
        alpha = re_a + 1j * im_a
        radius2 = re_a * re_a + im_a * im_a + re_b * re_b + im_b * im_b
        total += w1 * float(np.sum(w_rest * wigner_kernel(r_value, alpha, beta) * np.exp(radius2)))
    logger.debug(f"📐 Cartesian Wigner normalization r={r_value} order={order}: {total!r}")
    return total
