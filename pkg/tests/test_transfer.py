"""
Tests for transfer-matrix propagation, Lyapunov exponents and correlators.
"""

import math

import numpy as np
import pytest

from mfaoa.errors import CanonicalFormError
from mfaoa.fluctuations import (
    FluctuationOperator,
    equal_time_correlator,
    lyapunov_spectrum,
    propagate_transfer,
    tau3,
)


def _random_operator(rng, n, s=0.5):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = a + a.conj().T
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return FluctuationOperator(A=a, B=0.3 * (b + b.T), s=s)


def _squeezing_generator(rate):
    """Single-mode generator whose transfer matrix has singular values e^(+-rate t)."""
    return np.array([[0.0, rate], [-rate, 0.0]], dtype=complex)


class TestPropagation:
    """Test accumulation of transfer matrices."""

    def test_starts_at_identity(self):
        """Test that M_0 is the identity at t0."""
        rng = np.random.default_rng(0)
        transfers = propagate_transfer([_random_operator(rng, 3)], 0.1, t0=2.0)
        assert len(transfers) == 2
        np.testing.assert_array_equal(transfers[0].matrix, np.eye(6))
        assert transfers[0].t == 2.0
        assert transfers[1].t == pytest.approx(2.1)

    def test_flux_conservation(self):
        """Test M^H tau3 M = tau3 along a random operator sequence."""
        rng = np.random.default_rng(1)
        ops = [_random_operator(rng, 3) for _ in range(30)]
        for transfer in propagate_transfer(ops, 0.05):
            assert transfer.flux_error() < 1e-8

    def test_per_slice_steps(self):
        """Test that per-slice step sizes set the time axis."""
        rng = np.random.default_rng(2)
        ops = [_random_operator(rng, 2) for _ in range(3)]
        transfers = propagate_transfer(ops, [0.1, 0.2, 0.3])
        np.testing.assert_allclose([m.t for m in transfers], [0.0, 0.1, 0.3, 0.6])

    def test_empty_series_needs_dimension(self):
        """Test that an empty series returns only M_0 of the given size."""
        transfers = propagate_transfer([], 0.1, dimension=4)
        assert len(transfers) == 1
        assert transfers[0].matrix.shape == (4, 4)
        with pytest.raises(ValueError):
            propagate_transfer([], 0.1)


class TestLyapunovSpectrum:
    """Test Lyapunov exponents from singular values."""

    def test_identity_has_zero_exponents(self):
        """Test that the identity gives all-zero exponents."""
        np.testing.assert_array_equal(lyapunov_spectrum(np.eye(6)), np.zeros(3))

    def test_squeezing_rate(self):
        """Test that exponents grow linearly with the squeezing rate."""
        transfers = propagate_transfer([_squeezing_generator(0.5)] * 10, 0.1)
        np.testing.assert_allclose(lyapunov_spectrum(transfers[-1]), [0.5], rtol=1e-10)

    def test_exponents_sorted_and_nonnegative(self):
        """Test the shape and ordering of the exponents."""
        rng = np.random.default_rng(3)
        ops = [_random_operator(rng, 4) for _ in range(20)]
        exponents = lyapunov_spectrum(propagate_transfer(ops, 0.05)[-1])
        assert exponents.shape == (4,)
        assert np.all(exponents >= 0.0)
        assert np.all(np.diff(exponents) <= 0.0)

    def test_non_canonical_matrix_rejected(self):
        """Test that a matrix without reciprocal singular pairs is rejected."""
        with pytest.raises(CanonicalFormError):
            lyapunov_spectrum(np.diag([3.0, 1.0, 1.0, 1.0]))


class TestStabilizedRegime:
    """Test the QR-renormalized accumulation of large products."""

    @pytest.fixture
    def transfers(self):
        return propagate_transfer([_squeezing_generator(10.0)] * 100, 1.0)

    def test_switches_to_qr(self, transfers):
        """Test that late slices are stabilized and early ones are not."""
        assert not transfers[1].stabilized
        assert transfers[-1].stabilized
        assert np.all(np.isfinite(transfers[-1].matrix))

    def test_exponent_beyond_overflow(self, transfers):
        """Test that the leading exponent keeps growing past the overflow limit."""
        exponent = lyapunov_spectrum(transfers[-1])[0]
        assert exponent == pytest.approx(1000.0, rel=1e-3)

    def test_log_size(self, transfers):
        """Test that the fluctuation size is reported on a log scale."""
        correlator = equal_time_correlator([transfers[-1]])[0]
        assert correlator.g is None
        assert correlator.log_size == pytest.approx(2000.0 - math.log(2.0), rel=1e-3)
        assert math.isinf(correlator.size)

    def test_flux_error_needs_explicit_matrix(self, transfers):
        """Test that flux checks are refused for stabilized slices."""
        with pytest.raises(ValueError):
            transfers[-1].flux_error()

    def test_switch_reported_in_warnings(self):
        """Test that the switch to QR accumulation is reported once."""
        warnings = []
        propagate_transfer([_squeezing_generator(10.0)] * 100, 1.0, warnings=warnings)
        assert len(warnings) == 1
        assert "QR-renormalized" in warnings[0]

    def test_no_warning_below_overflow(self):
        """Test that short products leave the warning list empty."""
        warnings = []
        propagate_transfer([_squeezing_generator(0.5)] * 10, 0.1, warnings=warnings)
        assert warnings == []


class TestCorrelator:
    """Test equal-time correlators."""

    def test_identity(self):
        """Test that M = 1 gives g = tau3 and size N."""
        transfers = propagate_transfer([], 0.1, dimension=6)
        correlator = equal_time_correlator(transfers)[0]
        np.testing.assert_allclose(correlator.g, tau3(3))
        assert correlator.size == pytest.approx(3.0)

    def test_g_tau3_equals_m_m_dagger(self):
        """Test g tau3 = M M^H and Tr(g tau3) = 2 size."""
        rng = np.random.default_rng(4)
        ops = [_random_operator(rng, 3) for _ in range(15)]
        transfers = propagate_transfer(ops, 0.05)
        for transfer, correlator in zip(
            transfers, equal_time_correlator(transfers), strict=True
        ):
            m = transfer.matrix
            np.testing.assert_allclose(
                correlator.g @ tau3(3), m @ m.conj().T, atol=1e-8
            )
            assert np.trace(correlator.g @ tau3(3)).real == pytest.approx(
                2 * correlator.size
            )

    def test_squeezed_size(self):
        """Test size = cosh(2 lambda) for a single squeezed mode."""
        transfers = propagate_transfer([_squeezing_generator(0.5)] * 10, 0.1)
        correlator = equal_time_correlator([transfers[-1]])[0]
        assert correlator.size == pytest.approx(math.cosh(1.0))
