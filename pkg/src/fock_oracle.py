"""
Brute-force Fock-space check of the closed-form correlations.

The two-mode squeezed vacuum is truncated to per-mode photon numbers n <= N, displacement and
parity operators are built as explicit matrices, and the displaced-parity correlation is an
explicit expectation value. Displacement entries come from the closed-form Laguerre expression, so
every entry of the (N+1) x (N+1) block is exact; displaced parities use D(a) P D+(a) = D(2a) P and
the Schmidt-diagonal state reduces each expectation to O(N^2) work. working_cutoff gives the margin
needed when the product D P D+ is formed explicitly instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import gammaln

from .config import config
from .errors import ConvergenceNotReachedError, CutoffTooSmallError, InvalidArgumentError, OracleConsistencyError
from .gaussian_core import coerce_point, coerce_squeezing
from .models import ConvergenceRow

if TYPE_CHECKING:
    from .models import PhasePoint, SqueezeParam

logger = logging.getLogger(__name__)

IMAGINARY_RESIDUE_LIMIT = 1e-10
# Rescale the Laguerre ladder before it can overflow
_RESCALE_AT = 1e150


@dataclass(frozen=True)
class TruncatedState:
    """Two-mode state over |n>|m>, 0 <= n, m <= cutoff"""

    cutoff: int
    coefficients: np.ndarray
    tail_weight: float

    @property
    def norm(self) -> float:
        """Squared norm kept by the truncation, 1 - tail_weight for the squeezed vacuum"""
        return float(np.sum(np.abs(self.coefficients) ** 2))


@dataclass(frozen=True)
class ModeOperator:
    """Single-mode operator as a (cutoff+1) x (cutoff+1) matrix in the Fock basis"""

    cutoff: int
    entries: np.ndarray

    def dagger(self) -> ModeOperator:
        return ModeOperator(self.cutoff, self.entries.conj().T)

    def block(self, cutoff: int) -> ModeOperator:
        """Leading (cutoff+1) x (cutoff+1) block"""
        return ModeOperator(cutoff, self.entries[: cutoff + 1, : cutoff + 1])

    def __matmul__(self, other: ModeOperator) -> ModeOperator:
        return ModeOperator(self.cutoff, self.entries @ other.entries)


def _check_cutoff(cutoff: int) -> int:
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 1:
        raise InvalidArgumentError(f"Fock cutoff must be an integer >= 1, got {cutoff!r}")
    return int(cutoff)


def _log_tanh(r: float) -> float:
    t = math.tanh(r)
    if t >= 1.0:
        raise InvalidArgumentError(f"r={r} is too large for a Fock-space representation (tanh r rounds to 1)")
    return math.log(t)


def tail_weight(r: SqueezeParam | float, cutoff: int) -> float:
    """Probability above the cutoff: sum_{n > N} (1 - tanh^2 r) tanh^{2n} r = tanh^{2N+2} r"""
    r_value = coerce_squeezing(r)
    cutoff = _check_cutoff(cutoff)
    if r_value == 0.0:
        return 0.0
    return math.exp((2 * cutoff + 2) * _log_tanh(r_value))


def required_cutoff(r: SqueezeParam | float, tolerance: float | None = None) -> int:
    """Smallest N >= 1 with tanh^{2N+2} r <= tolerance"""
    r_value = coerce_squeezing(r)
    tolerance = config.tail_tolerance if tolerance is None else tolerance
    if not 0.0 < tolerance < 1.0:
        raise InvalidArgumentError(f"tail tolerance must lie in (0, 1), got {tolerance!r}")
    if r_value == 0.0:
        return 1
    cutoff = max(1, math.ceil(math.log(tolerance) / (2.0 * _log_tanh(r_value)) - 1.0))
    while tail_weight(r_value, cutoff) > tolerance:
        cutoff += 1
    return cutoff


def working_cutoff(cutoff: int, alpha: PhasePoint | complex, beta: PhasePoint | complex) -> int:
    """State cutoff plus the displacement margin ceil(8 (|alpha|^2 + |beta|^2)) + 10"""
    spread = abs(coerce_point(alpha)) ** 2 + abs(coerce_point(beta)) ** 2
    return _check_cutoff(cutoff) + math.ceil(8.0 * spread) + 10


def build_nopa_state(r: SqueezeParam | float, cutoff: int, tolerance: float | None = None) -> TruncatedState:
    """
    Schmidt form of the two-mode squeezed vacuum: c_nn = tanh^n r / cosh r, zero off the diagonal

    Args:
        r: Squeezing parameter
        cutoff: Per-mode photon-number cutoff N (dimension N+1)
        tolerance: Max discarded probability; None skips the check

    Raises:
        CutoffTooSmallError: tail_weight exceeds tolerance
    """
    r_value = coerce_squeezing(r)
    cutoff = _check_cutoff(cutoff)
    tail = tail_weight(r_value, cutoff)
    if tolerance is not None and tail > tolerance:
        raise CutoffTooSmallError(cutoff, tail, tolerance)

    diagonal = np.zeros(cutoff + 1)
    if r_value == 0.0:
        diagonal[0] = 1.0
    else:
        n = np.arange(cutoff + 1)
        log_cosh = r_value + math.log1p(math.exp(-2.0 * r_value)) - math.log(2.0)
        diagonal = np.exp(n * _log_tanh(r_value) - log_cosh)
    return TruncatedState(cutoff=cutoff, coefficients=np.diag(diagonal).astype(complex), tail_weight=tail)


def _laguerre_ladder(x: float, dim: int) -> np.ndarray:
    """
    ladder[n, k] = e^{-x/2} x^{k/2} sqrt(n! / (n+k)!) L_n^{(k)}(x) for 0 <= n, k < dim

    Runs the three-term Laguerre recurrence on the normalized functions
        sqrt((n+1)(n+k+1)) g_{n+1} = (2n+1+k-x) g_n - sqrt(n(n+k)) g_{n-1},
    all k at once, carrying the prefactor as a log scale so nothing factorial is ever formed.
    """
    k = np.arange(dim, dtype=float)
    log_scale = -0.5 * x + 0.5 * k * math.log(x) - 0.5 * gammaln(k + 1.0)
    previous = np.zeros(dim)
    current = np.ones(dim)
    ladder = np.empty((dim, dim))
    for n in range(dim):
        with np.errstate(under="ignore"):
            ladder[n] = current * np.exp(log_scale)
        following = ((2 * n + 1 + k - x) * current - np.sqrt(n * (n + k)) * previous) / np.sqrt((n + 1) * (n + k + 1))
        previous, current = current, following
        magnitude = np.maximum(np.abs(previous), np.abs(current))
        big = magnitude > _RESCALE_AT
        if np.any(big):
            previous[big] /= magnitude[big]
            current[big] /= magnitude[big]
            log_scale[big] += np.log(magnitude[big])
    return ladder


def displacement_matrix(alpha: PhasePoint | complex, cutoff: int) -> ModeOperator:
    """
    Exact leading block of D(alpha) = exp(alpha a+ - alpha* a)

    <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2) for m >= n,
    and sqrt(m!/n!) (-alpha*)^{n-m} e^{-|alpha|^2/2} L_m^{(n-m)}(|alpha|^2) otherwise.
    Every entry is the entry of the untruncated operator, so column norms never exceed 1.

    Raises:
        InvalidArgumentError: non-finite alpha or cutoff < 1
    """
    z = coerce_point(alpha)
    cutoff = _check_cutoff(cutoff)
    dim = cutoff + 1
    x = abs(z) ** 2
    # |alpha|^2 below the smallest double: D(alpha) is the identity to working precision
    if x == 0.0:
        return ModeOperator(cutoff, np.eye(dim, dtype=complex))

    ladder = _laguerre_ladder(x, dim)
    m, n = np.indices((dim, dim))
    lower = np.minimum(m, n)
    k = np.abs(m - n)
    theta = math.atan2(z.imag, z.real)
    phase = np.where(m >= n, np.exp(1j * k * theta), np.exp(1j * k * (math.pi - theta)))
    return ModeOperator(cutoff, ladder[lower, k] * phase)


def parity_matrix(cutoff: int) -> ModeOperator:
    """(-1)^n on the diagonal: Hermitian, unitary and involutory"""
    cutoff = _check_cutoff(cutoff)
    signs = np.where(np.arange(cutoff + 1) % 2 == 0, 1.0, -1.0)
    return ModeOperator(cutoff, np.diag(signs).astype(complex))


def displaced_parity_matrix(alpha: PhasePoint | complex, cutoff: int, working: int | None = None) -> ModeOperator:
    """
    D(alpha) (-1)^n D+(alpha) on the first cutoff+1 levels

    By default uses D(alpha) P D+(alpha) = D(2 alpha) P: the exact entries of D(2 alpha) with
    odd columns negated, O(N^2). With working set, forms the product explicitly at that
    dimension and keeps the leading block, which is only as good as the working margin.
    """
    cutoff = _check_cutoff(cutoff)
    if working is None:
        signs = np.where(np.arange(cutoff + 1) % 2 == 0, 1.0, -1.0)
        return ModeOperator(cutoff, displacement_matrix(2.0 * coerce_point(alpha), cutoff).entries * signs)
    working = max(_check_cutoff(working), cutoff)
    displacement = displacement_matrix(alpha, working)
    full = displacement @ parity_matrix(working) @ displacement.dagger()
    return full.block(cutoff)


def _expectation(state: TruncatedState, first: ModeOperator, second: ModeOperator) -> float:
    """
    <psi| A (x) B |psi> = sum_nm conj(C)_nm (A C B^T)_nm

    For a Schmidt-diagonal C = diag(c) this is c* . (A * B) . c, no matrix product needed.
    """
    c = state.coefficients
    schmidt = np.diagonal(c)
    if np.count_nonzero(c) == np.count_nonzero(schmidt):
        value = complex(schmidt.conj() @ (first.entries * second.entries) @ schmidt)
    else:
        value = complex(np.sum(c.conj() * (first.entries @ c @ second.entries.T)))
    if abs(value.imag) > IMAGINARY_RESIDUE_LIMIT:
        raise OracleConsistencyError(f"Oracle expectation has imaginary residue {value.imag:.3e}")
    return value.real


def _oracle_at(r: float, alpha: complex, beta: complex, cutoff: int, tolerance: float | None) -> float:
    state = build_nopa_state(r, cutoff, tolerance)
    first = displaced_parity_matrix(alpha, cutoff)
    second = displaced_parity_matrix(beta, cutoff)
    value = _expectation(state, first, second)
    logger.debug(f"🔬 Oracle r={r} N={cutoff} tail={state.tail_weight:.3e}: {value!r}")
    return value


def oracle_correlation(
    r: SqueezeParam | float,
    alpha: PhasePoint | complex,
    beta: PhasePoint | complex,
    cutoff: int | None = None,
    tolerance: float | None = None,
    verify_convergence: bool = False,
    convergence_tolerance: float = 1e-8,
) -> float:
    """
    Displaced-parity correlation by explicit matrix algebra on the truncated state

    Args:
        r: Squeezing parameter
        alpha, beta: Displacements of mode 1 and mode 2
        cutoff: State cutoff N; None picks required_cutoff(r, tolerance)
        tolerance: Max discarded probability (default: config tail tolerance)
        verify_convergence: Also evaluate at 2N and compare
        convergence_tolerance: Max change allowed by the doubling check

    Raises:
        CutoffTooSmallError: the cutoff discards more than tolerance
        ConvergenceNotReachedError: doubling the cutoff changed the value too much
        OracleConsistencyError: the expectation value is not real
    """
    r_value = coerce_squeezing(r)
    a = coerce_point(alpha)
    b = coerce_point(beta)
    tolerance = config.tail_tolerance if tolerance is None else tolerance
    cutoff = required_cutoff(r_value, tolerance) if cutoff is None else _check_cutoff(cutoff)

    value = _oracle_at(r_value, a, b, cutoff, tolerance)
    if verify_convergence:
        doubled = _oracle_at(r_value, a, b, 2 * cutoff, tolerance)
        if abs(doubled - value) > convergence_tolerance:
            raise ConvergenceNotReachedError(cutoff, value, doubled, convergence_tolerance)
    return value


def convergence_report(
    r: SqueezeParam | float,
    alpha: PhasePoint | complex,
    beta: PhasePoint | complex,
    cutoffs: list[int],
) -> list[ConvergenceRow]:
    """
    Oracle value at each cutoff with successive differences, for choosing production cutoffs

    No tail tolerance is enforced: small cutoffs are the point of the report.
    """
    r_value = coerce_squeezing(r)
    a = coerce_point(alpha)
    b = coerce_point(beta)
    cutoffs = [_check_cutoff(c) for c in cutoffs]
    if any(later <= earlier for earlier, later in zip(cutoffs, cutoffs[1:], strict=False)):
        raise InvalidArgumentError(f"cutoffs must be strictly increasing, got {cutoffs}")

    rows: list[ConvergenceRow] = []
    previous: float | None = None
    for cutoff in cutoffs:
        value = _oracle_at(r_value, a, b, cutoff, None)
        delta = None if previous is None else abs(value - previous)
        rows.append(ConvergenceRow(cutoff=cutoff, value=value, delta=delta, tail_weight=tail_weight(r_value, cutoff)))
        previous = value
    logger.info(f"✓ Convergence report r={r_value}: {len(rows)} cutoff(s), final delta {rows[-1].delta}")
    return rows
