"""
Tests for Ising problems, generators and symmetry breaking.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mfaoa.errors import (
    DimensionError,
    InvalidInstanceError,
    SymmetryAlreadyBrokenError,
)
from mfaoa.problems import (
    IsingProblem,
    as_bitstring,
    break_symmetry,
    custom_instance,
    energies,
    energy,
    generate,
    partition_from_weights,
    partition_instance,
    restore_bitstring,
    sk_instance,
)


def _product_coupling_cdf(couplings):
    """CDF of J = -2 a b for independent a, b uniform on (0, 1]."""
    x = -np.asarray(couplings) / 2.0
    return 1.0 - (x - x * np.log(x))


class TestIsingProblem:
    """Test construction and validation of problem instances."""

    def test_driver_defaults_to_ones(self):
        """Test that a missing driver means unit amplitudes."""
        problem = IsingProblem(couplings=np.zeros((3, 3)), fields=[0.1, 0.0, 0.0])
        np.testing.assert_array_equal(problem.driver, np.ones(3))

    def test_arrays_are_read_only_copies(self):
        """Test that the problem does not alias caller arrays."""
        couplings = np.array([[0.0, 1.0], [1.0, 0.0]])
        problem = IsingProblem(couplings=couplings, fields=[0.0, 0.0])
        couplings[0, 1] = 5.0
        assert problem.couplings[0, 1] == 1.0
        with pytest.raises(ValueError):
            problem.couplings[0, 1] = 2.0

    def test_asymmetric_couplings_rejected(self):
        """Test that J must be exactly symmetric."""
        with pytest.raises(InvalidInstanceError):
            IsingProblem(couplings=[[0.0, 1.0], [0.5, 0.0]], fields=[0.0, 0.0])

    def test_nonzero_diagonal_rejected(self):
        """Test that J must have a zero diagonal."""
        with pytest.raises(InvalidInstanceError):
            IsingProblem(couplings=[[1.0, 0.0], [0.0, 0.0]], fields=[0.0, 0.0])

    def test_nonpositive_driver_rejected(self):
        """Test that driver amplitudes must be positive."""
        with pytest.raises(InvalidInstanceError):
            IsingProblem(couplings=np.zeros((2, 2)), fields=[0, 0], driver=[1.0, 0.0])

    def test_nan_rejected(self):
        """Test that non-finite couplings are rejected."""
        couplings = np.array([[0.0, np.nan], [np.nan, 0.0]])
        with pytest.raises(InvalidInstanceError):
            IsingProblem(couplings=couplings, fields=[0.0, 0.0])

    def test_shape_mismatch_rejected(self):
        """Test that J and h sizes must agree."""
        with pytest.raises(InvalidInstanceError):
            IsingProblem(couplings=np.zeros((3, 3)), fields=[0.0, 0.0])

    def test_is_symmetric(self, sk6, fielded4):
        """Test Z2 symmetry detection."""
        assert sk6.is_symmetric
        assert not fielded4.is_symmetric

    def test_invalid_instance_is_value_error(self):
        """Test that domain errors are still ValueErrors."""
        with pytest.raises(ValueError):
            custom_instance([[0.0, 1.0], [2.0, 0.0]])


class TestEnergy:
    """Test classical energy evaluation."""

    def test_energy_matches_pair_sum(self, fielded4):
        """Test the vectorized energy against the explicit i<j sum."""
        sigma = np.array([1, -1, -1, 1])
        expected = fielded4.energy_offset - fielded4.fields @ sigma
        for i, j in itertools.combinations(range(4), 2):
            expected -= fielded4.couplings[i, j] * sigma[i] * sigma[j]
        assert energy(fielded4, sigma) == pytest.approx(expected, abs=1e-12)

    def test_batch_matches_single(self, sk6):
        """Test that energies() agrees with energy() row by row."""
        rng = np.random.default_rng(0)
        sigmas = rng.choice([-1, 1], size=(10, 6))
        batch = energies(sk6, sigmas)
        for row, value in zip(sigmas, batch, strict=True):
            assert value == pytest.approx(energy(sk6, row), abs=1e-12)

    def test_wrong_length_rejected(self, sk6):
        """Test that a bitstring of the wrong length is rejected."""
        with pytest.raises(DimensionError):
            energy(sk6, [1, 1, 1])

    def test_non_spin_entries_rejected(self):
        """Test that entries other than +1/-1 are rejected."""
        with pytest.raises(DimensionError):
            as_bitstring([1, 0, -1])

    def test_partition_energy_is_squared_discrepancy(self, partition8):
        """Test that the partition encoding reproduces (sum a_i s_i)^2."""
        rng = np.random.default_rng(1)
        for _ in range(20):
            sigma = rng.choice([-1, 1], size=8)
            assert energy(partition8.problem, sigma) == pytest.approx(
                partition8.cost(sigma), abs=1e-12
            )

    @settings(max_examples=30, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10_000),
        n=st.integers(min_value=2, max_value=7),
    )
    def test_global_flip_invariance(self, seed, n):
        """Test that field-free energies are invariant under flipping all spins."""
        problem = sk_instance(n, seed)
        sigma = np.random.default_rng(seed).choice([-1, 1], size=n)
        assert energy(problem, sigma) == pytest.approx(energy(problem, -sigma))


class TestGenerators:
    """Test the seeded instance generators."""

    def test_sk_is_deterministic(self):
        """Test that the same seed gives the same couplings."""
        np.testing.assert_array_equal(
            sk_instance(10, 42).couplings, sk_instance(10, 42).couplings
        )

    def test_sk_stream_order(self):
        """Test the row-major upper-triangle draw order and 1/sqrt(n) scaling."""
        n = 5
        draws = np.random.default_rng(9).standard_normal(n * (n - 1) // 2)
        problem = sk_instance(n, 9)
        rows, cols = np.triu_indices(n, k=1)
        np.testing.assert_allclose(problem.couplings[rows, cols], draws / np.sqrt(n))

    def test_sk_has_no_fields(self, sk11):
        """Test that SK instances are Z2-symmetric."""
        assert sk11.is_symmetric
        assert sk11.kind == "sk"
        assert sk11.seed == 7

    def test_partition_weights_in_unit_interval(self):
        """Test that partition weights are drawn from (0, 1]."""
        instance = partition_instance(50, 3)
        assert np.all(instance.weights > 0.0)
        assert np.all(instance.weights <= 1.0)

    def test_partition_coupling_formula(self):
        """Test J_ij = -2 a_i a_j and offset sum a_i^2."""
        weights = [0.5, 0.25, 1.0]
        problem = partition_from_weights(weights).problem
        assert problem.couplings[0, 1] == pytest.approx(-0.25)
        assert problem.couplings[1, 2] == pytest.approx(-0.5)
        assert problem.energy_offset == pytest.approx(0.25 + 0.0625 + 1.0)

    def test_partition_weights_out_of_range(self):
        """Test that weights outside (0, 1] are rejected."""
        with pytest.raises(InvalidInstanceError):
            partition_from_weights([0.5, 1.5])

    def test_sk_coupling_moments(self):
        """Test that SK couplings have mean 0 and variance 1/n over many seeds."""
        n, seeds = 20, 1000
        rows, cols = np.triu_indices(n, k=1)
        samples = np.concatenate(
            [sk_instance(n, seed).couplings[rows, cols] for seed in range(seeds)]
        )
        variance = 1.0 / n
        assert abs(np.mean(samples)) < 5.0 * np.sqrt(variance / samples.size)
        assert abs(np.var(samples, ddof=1) - variance) < 5.0 * variance * np.sqrt(
            2.0 / (samples.size - 1)
        )
        assert stats.kstest(samples * np.sqrt(n), "norm").pvalue > 1e-3

    def test_partition_coupling_distribution(self):
        """Test that J = -2 a_i a_j follows the density ln(-2/J) / 2 on [-2, 0)."""
        samples = np.array(
            [
                partition_instance(8, seed).problem.couplings[0, 1]
                for seed in range(4000)
            ]
        )
        assert np.all((samples >= -2.0) & (samples < 0.0))
        assert stats.kstest(samples, _product_coupling_cdf).pvalue > 1e-3

    @pytest.mark.parametrize("n", [0, 1])
    def test_generators_need_two_spins(self, n):
        """Test that generators reject n < 2."""
        with pytest.raises(InvalidInstanceError):
            sk_instance(n, 0)

    def test_generate_dispatch(self):
        """Test generate() for both kinds and an unknown kind."""
        assert generate("sk", 4, 1).kind == "sk"
        assert generate("partition", 4, 1).kind == "partition"
        with pytest.raises(InvalidInstanceError):
            generate("maxcut", 4, 1)


class TestBreakSymmetry:
    """Test the Z2 symmetry-breaking reduction."""

    def test_reduced_energy_matches_full(self, sk6):
        """Test E_reduced(s') == E_full(s', +1) for every reduced string."""
        reduced = break_symmetry(sk6)
        assert reduced.n == 5
        for bits in itertools.product([-1, 1], repeat=5):
            full = restore_bitstring(bits)
            assert energy(reduced, bits) == pytest.approx(energy(sk6, full), abs=1e-12)

    def test_fields_are_last_column(self, sk6):
        """Test that h_i = J_{i,N-1}."""
        reduced = break_symmetry(sk6)
        np.testing.assert_array_equal(reduced.fields, sk6.couplings[:-1, -1])

    def test_rejects_fielded_problem(self, fielded4):
        """Test that an already-broken problem is rejected."""
        with pytest.raises(SymmetryAlreadyBrokenError):
            break_symmetry(fielded4)

    def test_restore_appends_plus_one(self):
        """Test that the fixed spin is restored as +1."""
        np.testing.assert_array_equal(restore_bitstring([-1, 1]), [-1, 1, 1])
