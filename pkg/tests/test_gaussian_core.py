"""
Tests for the closed-form displaced-parity correlation and Wigner function
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import InvalidArgumentError
from src.gaussian_core import WIGNER_SCALE, log_parity_correlation, log_parity_kernel, parity_correlation, wigner
from src.models import PhasePoint, SqueezeParam


def _textbook_exponent(r, alpha, beta):
    """cosh/sinh form, fine at moderate r"""
    return -2 * math.cosh(2 * r) * (abs(alpha) ** 2 + abs(beta) ** 2) + 2 * math.sinh(2 * r) * 2 * (alpha * beta).real


def _random_point(rng, radius=1.0):
    rho = radius * math.sqrt(rng.uniform())
    phi = rng.uniform(0, 2 * math.pi)
    return complex(rho * math.cos(phi), rho * math.sin(phi))


class TestParityCorrelation:
    """Test parity_correlation examples"""

    @pytest.mark.unit
    @pytest.mark.parametrize("r", [0.0, 1.0, 5.0, 50.0])
    def test_perfect_pair_correlation_at_origin(self, r):
        """Pi(0, 0) is exactly 1 for every squeezing"""
        assert parity_correlation(r, 0, 0) == 1.0

    @pytest.mark.unit
    def test_vacuum_single_displacement(self):
        """r = 0 with |beta|^2 = 0.5 gives e^-1"""
        value = parity_correlation(0.0, 0, math.sqrt(0.5))
        assert value == pytest.approx(math.exp(-1.0), rel=1e-14)

    @pytest.mark.unit
    def test_anticorrelated_displacement(self):
        """Pi(sqrt J; -sqrt J) = exp(-4 J e^{2r})"""
        J = 0.03
        value = parity_correlation(1.0, math.sqrt(J), -math.sqrt(J))
        assert value == pytest.approx(math.exp(-4 * J * math.exp(2.0)), rel=1e-13)
        assert value == pytest.approx(0.412018621898, rel=1e-11)

    @pytest.mark.unit
    def test_accepts_domain_types(self):
        """PhasePoint and SqueezeParam are accepted in place of raw numbers"""
        alpha = PhasePoint(re=0.2, im=-0.1)
        beta = PhasePoint(re=-0.3, im=0.05)
        assert parity_correlation(SqueezeParam(r=0.7), alpha, beta) == parity_correlation(0.7, 0.2 - 0.1j, -0.3 + 0.05j)

    @pytest.mark.unit
    def test_matches_textbook_form(self, rng):
        """Stable exponent equals the cosh/sinh expression at moderate r"""
        for _ in range(200):
            r = rng.uniform(0, 2)
            alpha, beta = _random_point(rng), _random_point(rng)
            assert log_parity_correlation(r, alpha, beta) == pytest.approx(_textbook_exponent(r, alpha, beta), rel=1e-12, abs=1e-12)

    @pytest.mark.unit
    def test_range(self, rng):
        """0 < Pi <= 1 on random inputs"""
        for _ in range(500):
            r = rng.uniform(0, 1.5)
            value = parity_correlation(r, _random_point(rng, 1.5), _random_point(rng, 1.5))
            assert 0.0 < value <= 1.0


class TestLogParityCorrelation:
    """Test the log-domain exponent"""

    @pytest.mark.unit
    @pytest.mark.parametrize("r", [0.0, 2.5, 300.0, 400.0])
    def test_zero_at_origin(self, r):
        """Exponent vanishes at the origin, even where e^{2r} overflows"""
        assert log_parity_correlation(r, 0, 0) == 0.0

    @pytest.mark.unit
    def test_asymptotic_optimum_exponent(self):
        """At J e^{2r} = ln2/3 the paired exponent is -(4/3) ln 2"""
        J = math.log(2) / 3 * math.exp(-10.0)
        value = log_parity_correlation(5.0, math.sqrt(J), -math.sqrt(J))
        assert value == pytest.approx(-(4.0 / 3.0) * math.log(2), rel=1e-13)

    @pytest.mark.unit
    def test_no_cross_term_without_squeezing(self):
        """sinh(0) = 0 removes the cross term: alpha = beta = 1 gives -4"""
        assert log_parity_correlation(0.0, 1, 1) == pytest.approx(-4.0, abs=1e-15)

    @pytest.mark.unit
    def test_large_r_stays_finite(self):
        """No overflow for r <= 300"""
        value = log_parity_correlation(300.0, 0.1, 0.1j)
        assert math.isfinite(value)
        assert value < 0.0
        assert parity_correlation(300.0, 0.1, 0.1j) == 0.0

    @pytest.mark.unit
    def test_overflowing_squeezing_keeps_zero_weights(self):
        """When 2r itself overflows, zero weights still contribute exactly nothing"""
        assert parity_correlation(1e308, 0, 0) == 1.0
        assert parity_correlation(1e308, 0.5, 0.5) == 1.0
        assert parity_correlation(1e308, 0.5, -0.5) == 0.0
        assert log_parity_correlation(1e308, 0.1, 0) == -math.inf

    @pytest.mark.unit
    def test_exp_matches_correlation(self, rng):
        """exp(log Pi) equals Pi to 1e-14 relative"""
        for _ in range(300):
            r = rng.uniform(0, 3)
            alpha, beta = _random_point(rng), _random_point(rng)
            expected = parity_correlation(r, alpha, beta)
            assert math.exp(log_parity_correlation(r, alpha, beta)) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.unit
    def test_kernel_broadcasts(self):
        """Vectorised kernel agrees with the scalar operation element-wise"""
        alphas = np.array([0.0, 0.3 + 0.1j, -0.2j])
        betas = np.array([0.0, -0.3 + 0.1j, 0.5])
        values = log_parity_kernel(1.2, alphas, betas)
        assert values.shape == (3,)
        for a, b, v in zip(alphas, betas, values, strict=True):
            assert v == log_parity_correlation(1.2, a, b)


class TestSymmetries:
    """Test invariants of the closed form"""

    @pytest.mark.unit
    def test_swap_symmetry(self, rng):
        """Pi(alpha; beta) = Pi(beta; alpha)"""
        for _ in range(200):
            r = rng.uniform(0, 3)
            alpha, beta = _random_point(rng), _random_point(rng)
            assert parity_correlation(r, alpha, beta) == pytest.approx(parity_correlation(r, beta, alpha), rel=1e-14)

    @pytest.mark.unit
    def test_conjugation_invariance(self, rng):
        """Pi(alpha; beta) = Pi(alpha*; beta*)"""
        for _ in range(200):
            r = rng.uniform(0, 3)
            alpha, beta = _random_point(rng), _random_point(rng)
            conjugated = parity_correlation(r, alpha.conjugate(), beta.conjugate())
            assert parity_correlation(r, alpha, beta) == pytest.approx(conjugated, rel=1e-14)

    @pytest.mark.unit
    def test_product_state_at_zero_squeezing(self, rng):
        """At r = 0 the correlation factorizes into exp(-2|alpha|^2) exp(-2|beta|^2)"""
        for _ in range(200):
            alpha, beta = _random_point(rng, 2.0), _random_point(rng, 2.0)
            expected = math.exp(-2 * abs(alpha) ** 2) * math.exp(-2 * abs(beta) ** 2)
            assert parity_correlation(0.0, alpha, beta) == pytest.approx(expected, rel=1e-13)


class TestWigner:
    """Test the Wigner function"""

    @pytest.mark.unit
    @pytest.mark.parametrize("r", [0.0, 0.8, 4.0])
    def test_value_at_origin(self, r):
        """W(0; 0) = 4/pi^2"""
        assert wigner(r, 0, 0) == pytest.approx(4 / math.pi**2, rel=1e-15)
        assert wigner(r, 0, 0) == pytest.approx(0.405284734569, rel=1e-11)

    @pytest.mark.unit
    def test_vacuum_product(self):
        """r = 0, |alpha|^2 = 1, beta = 0 gives (4/pi^2) e^-2"""
        assert wigner(0.0, 1j, 0) == pytest.approx(WIGNER_SCALE * math.exp(-2.0), rel=1e-14)

    @pytest.mark.unit
    def test_strictly_positive(self, rng):
        """The Wigner function of this state is positive everywhere it is representable"""
        for _ in range(200):
            assert wigner(rng.uniform(0, 1), _random_point(rng), _random_point(rng)) > 0.0


class TestArgumentValidation:
    """Test invalid-argument errors"""

    @pytest.mark.unit
    @pytest.mark.parametrize("r", [-0.1, math.nan, math.inf])
    def test_invalid_squeezing(self, r):
        """Negative or non-finite r is rejected"""
        with pytest.raises(InvalidArgumentError):
            parity_correlation(r, 0, 0)
        with pytest.raises(InvalidArgumentError):
            log_parity_correlation(r, 0, 0)
        with pytest.raises(InvalidArgumentError):
            wigner(r, 0, 0)

    @pytest.mark.unit
    @pytest.mark.parametrize("point", [complex(math.nan, 0), complex(0, math.inf), "not a number"])
    def test_invalid_amplitude(self, point):
        """Non-finite or non-numeric amplitudes are rejected"""
        with pytest.raises(InvalidArgumentError):
            parity_correlation(0.5, point, 0)

    @pytest.mark.unit
    def test_invalid_argument_is_value_error(self):
        """Callers catching ValueError still see argument errors"""
        with pytest.raises(ValueError):
            parity_correlation(-1.0, 0, 0)

    @pytest.mark.unit
    def test_phase_point_rejects_nan(self):
        """PhasePoint itself refuses non-finite components"""
        with pytest.raises(ValidationError):
            PhasePoint(re=math.nan, im=0.0)
