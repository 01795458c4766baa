"""
Tests for the mean-field evolution, refinement and solve pipeline.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from mfaoa.dynamics import (
    Schedule,
    SpinConfiguration,
    evolve,
    linear_schedule,
    magnetization,
    refine,
    round_solution,
    solve,
    step,
    step_angles,
    two_flip_refine,
)
from mfaoa.errors import (
    DimensionError,
    InvalidParameterError,
    InvalidScheduleError,
    NumericContaminationError,
    SymmetricInputError,
)
from mfaoa.exact import brute_force_ground, qaoa_bloch_trajectory
from mfaoa.problems import break_symmetry, custom_instance, energy, sk_instance


def _random_configuration(rng, n):
    vectors = rng.standard_normal((n, 3))
    return SpinConfiguration(vectors / np.linalg.norm(vectors, axis=1)[:, None])


class TestSchedule:
    """Test the linear annealing schedule."""

    def test_linear_ramp_values(self):
        """Test gamma_k = tau k / p and beta_k = tau (1 - (k - 1) / p)."""
        schedule = linear_schedule(4, 0.5)
        np.testing.assert_allclose(schedule.gammas, [0.125, 0.25, 0.375, 0.5])
        np.testing.assert_allclose(schedule.betas, [0.5, 0.375, 0.25, 0.125])
        assert schedule.total_time == pytest.approx(2.0)

    def test_single_layer(self):
        """Test that p = 1 gives gamma = beta = tau."""
        schedule = linear_schedule(1, 0.3)
        assert schedule.gammas[0] == pytest.approx(0.3)
        assert schedule.betas[0] == pytest.approx(0.3)

    @pytest.mark.parametrize(("p", "tau"), [(0, 0.5), (-3, 0.5), (10, 0.0), (10, -1)])
    def test_invalid_parameters(self, p, tau):
        """Test that p < 1 and tau <= 0 are rejected."""
        with pytest.raises(InvalidScheduleError):
            linear_schedule(p, tau)

    def test_explicit_angles_length_checked(self):
        """Test that angle arrays must have length p."""
        with pytest.raises(InvalidScheduleError):
            Schedule(p=3, tau=0.5, gammas=[0.1, 0.2], betas=[0.1, 0.2, 0.3])


class TestStep:
    """Test a single layer of spin rotations."""

    def test_zero_angles_are_identity(self, fielded4):
        """Test that gamma = beta = 0 leaves the configuration unchanged."""
        config = _random_configuration(np.random.default_rng(0), 4)
        result = step(fielded4, config, 0.0, 0.0)
        np.testing.assert_allclose(result.spins, config.spins, atol=1e-15)

    def test_matches_equations_of_motion(self, fielded4):
        """Test both sub-steps against direct integration of the precession."""
        config = _random_configuration(np.random.default_rng(1), 4)
        gamma, beta = 0.37, 0.21
        m = magnetization(fielded4, config)
        delta = fielded4.driver

        def problem_rhs(_, u):
            x, y = u.reshape(2, -1)
            return np.concatenate([2 * m * y, -2 * m * x])

        def driver_rhs(_, u):
            y, z = u.reshape(2, -1)
            return np.concatenate([2 * delta * z, -2 * delta * y])

        first = solve_ivp(
            problem_rhs,
            (0.0, gamma),
            np.concatenate([config.x, config.y]),
            method="DOP853",
            rtol=1e-12,
            atol=1e-12,
        ).y[:, -1]
        x, y = first.reshape(2, -1)
        second = solve_ivp(
            driver_rhs,
            (0.0, beta),
            np.concatenate([y, config.z]),
            method="DOP853",
            rtol=1e-12,
            atol=1e-12,
        ).y[:, -1]
        y, z = second.reshape(2, -1)

        result = step(fielded4, config, gamma, beta)
        np.testing.assert_allclose(result.spins, np.column_stack([x, y, z]), atol=1e-9)

    def test_problem_substep_uses_incoming_magnetization(self):
        """Test that the z-rotation angle uses the configuration before the step."""
        problem = custom_instance([[0.0, 1.0], [1.0, 0.0]], fields=[0.5, 0.0])
        spins = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        result = step(problem, SpinConfiguration(spins), 0.1, 0.0)
        angle = 2 * (0.5 + 1.0) * 0.1
        np.testing.assert_allclose(
            result.spins[0], [np.cos(angle), -np.sin(angle), 0.0], atol=1e-15
        )

    def test_dimension_mismatch(self, fielded4):
        """Test that a configuration of the wrong size is rejected."""
        with pytest.raises(DimensionError):
            step(fielded4, SpinConfiguration.initial(3), 0.1, 0.1)

    def test_nan_input_rejected(self, fielded4):
        """Test that NaN spins raise a numeric contamination error."""
        spins = SpinConfiguration.initial(4).spins.copy()
        spins[2, 1] = np.nan
        with pytest.raises(NumericContaminationError):
            step(fielded4, SpinConfiguration(spins), 0.1, 0.1)

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=5000),
        gamma=st.floats(min_value=-2.0, max_value=2.0),
        beta=st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_norm_preserved(self, seed, gamma, beta):
        """Test that every step keeps the Bloch vectors on the unit sphere."""
        rng = np.random.default_rng(seed)
        problem = break_symmetry(sk_instance(6, seed))
        config = _random_configuration(rng, problem.n)
        assert step(problem, config, gamma, beta).norm_error() < 1e-12


class TestEvolve:
    """Test full trajectories."""

    def test_symmetric_problem_rejected(self, sk6):
        """Test that a field-free problem cannot be evolved."""
        with pytest.raises(SymmetricInputError):
            evolve(sk6, linear_schedule(10, 0.5))

    def test_norm_drift_over_long_run(self, sk11):
        """Test that the norm stays within 1e-9 after 2000 steps."""
        final, _ = evolve(break_symmetry(sk11), linear_schedule(2000, 0.5))
        assert final.norm_error() < 1e-9

    def test_recording_stride_keeps_final_slice(self, fielded4):
        """Test that the trajectory holds every stride-th slice plus the last."""
        schedule = linear_schedule(10, 0.5)
        _, trajectory = evolve(fielded4, schedule, record=True, stride=3)
        np.testing.assert_array_equal(trajectory.steps, [0, 3, 6, 9, 10])
        np.testing.assert_allclose(trajectory.times, trajectory.steps * 0.5)
        np.testing.assert_allclose(trajectory.s, trajectory.steps / 10)
        assert len(trajectory) == 5

    def test_zero_stride_rejected(self, fielded4):
        """Test that a recording stride below one is a parameter error."""
        with pytest.raises(InvalidParameterError):
            evolve(fielded4, linear_schedule(10, 0.5), record=True, stride=0)

    def test_recorded_final_matches_returned(self, fielded4):
        """Test that the last recorded slice equals the returned configuration."""
        final, trajectory = evolve(fielded4, linear_schedule(25, 0.4), record=True)
        np.testing.assert_array_equal(trajectory.spins[-1], final.spins)

    def test_trajectory_magnetizations(self, fielded4):
        """Test that recorded magnetizations are h + J n^z of each slice."""
        _, trajectory = evolve(fielded4, linear_schedule(5, 0.5), record=True)
        for index in range(len(trajectory)):
            np.testing.assert_allclose(
                trajectory.magnetizations[index],
                magnetization(fielded4, trajectory.configuration(index)),
            )

    @pytest.mark.parametrize(
        "field, driver, p",
        [
            (1.0, 1.0, 100),
            (-1.0, 1.0, 100),
            (0.3, 1.0, 100),
            (-0.3, 1.0, 100),
            (0.7, 1.3, 30),
        ],
    )
    def test_single_spin_matches_qaoa(self, field, driver, p):
        """Test that for one spin the mean-field dynamics are exact."""
        problem = custom_instance([[0.0]], fields=[field], driver=[driver])
        schedule = linear_schedule(p, 0.5)
        _, trajectory = evolve(problem, schedule, record=True)
        bloch = qaoa_bloch_trajectory(problem, schedule)
        np.testing.assert_allclose(trajectory.spins, bloch, atol=1e-8)

    def test_uncoupled_spins_match_qaoa(self):
        """Test that without couplings every qubit follows its own Bloch vector."""
        problem = custom_instance(np.zeros((3, 3)), fields=[0.4, -0.9, 0.2])
        schedule = linear_schedule(12, 0.7)
        final, _ = evolve(problem, schedule)
        bloch = qaoa_bloch_trajectory(problem, schedule)[-1]
        np.testing.assert_allclose(final.spins, bloch, atol=1e-10)


class TestRounding:
    """Test rounding and step-angle helpers."""

    def test_zero_maps_to_plus_one(self):
        """Test that n^z = 0 rounds to +1."""
        config = SpinConfiguration(np.array([[1.0, 0, 0], [0, 0, -1.0], [0, 0, 1.0]]))
        np.testing.assert_array_equal(round_solution(config), [1, -1, 1])

    def test_step_angles(self):
        """Test angles between matching Bloch vectors."""
        first = np.array([[1.0, 0, 0], [0, 0, 1.0]])
        second = np.array([[0, 1.0, 0], [0, 0, 1.0]])
        np.testing.assert_allclose(step_angles(first, second), [np.pi / 2, 0.0])


class TestTwoFlip:
    """Test the pair-flip post-processing."""

    def test_never_increases_energy(self, sk6):
        """Test that the returned string never has higher energy."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            sigma = rng.choice([-1, 1], size=6)
            refined = two_flip_refine(sk6, sigma)
            assert energy(sk6, refined) <= energy(sk6, sigma) + 1e-12

    def test_finds_best_pair(self):
        """Test against an explicit search over all pairs."""
        problem = sk_instance(7, 11)
        sigma = np.array([1, 1, -1, 1, -1, -1, 1])
        best = energy(problem, sigma)
        for i in range(7):
            for j in range(i + 1, 7):
                trial = sigma.copy()
                trial[[i, j]] *= -1
                best = min(best, energy(problem, trial))
        assert energy(problem, two_flip_refine(problem, sigma)) == pytest.approx(best)

    def test_single_spin_unchanged(self):
        """Test that one spin has no pairs to flip."""
        problem = custom_instance([[0.0]], fields=[1.0])
        np.testing.assert_array_equal(two_flip_refine(problem, [-1]), [-1])


class TestRefine:
    """Test step-count refinement."""

    def test_converges_on_small_instance(self, fielded4):
        """Test that refinement converges when p doubling stops changing sigma."""
        result = refine(fielded4, 0.5, 200, max_rounds=6)
        assert result.converged
        assert 2 <= result.rounds <= 6
        assert result.schedule.p == 200 * 2 ** (result.rounds - 1)

    def test_one_round_cannot_converge(self, fielded4):
        """Test that a single round reports non-convergence with a warning."""
        result = refine(fielded4, 0.5, 50, max_rounds=1)
        assert not result.converged
        assert result.warnings

    def test_invalid_round_count(self, fielded4):
        """Test that max_rounds must be positive."""
        with pytest.raises(InvalidScheduleError):
            refine(fielded4, 0.5, 50, max_rounds=0)


class TestSolve:
    """Test the end-to-end solve pipeline."""

    def test_energy_reported_on_full_problem(self, sk6):
        """Test that sigma has the full length and its energy is consistent."""
        solution = solve(sk6, tau=0.5, p=200)
        assert solution.sigma.shape == (6,)
        assert solution.sigma[-1] == 1
        assert solution.energy == pytest.approx(energy(sk6, solution.sigma))
        assert solution.dynamics_problem.n == 5

    def test_symmetric_without_breaking_fails(self, sk6):
        """Test that disabling symmetry breaking on SK raises."""
        with pytest.raises(SymmetricInputError):
            solve(sk6, tau=0.5, p=10, break_symmetry_first=False)

    def test_two_flip_not_worse(self, sk11):
        """Test that two-flip post-processing never raises the energy."""
        plain = solve(sk11, tau=0.5, p=300)
        flipped = solve(sk11, tau=0.5, p=300, two_flip=True)
        assert flipped.energy <= plain.energy + 1e-12

    def test_deterministic(self, sk11):
        """Test that repeated runs are bit-identical."""
        first = solve(sk11, tau=0.5, p=200)
        second = solve(sk11, tau=0.5, p=200)
        np.testing.assert_array_equal(first.final.spins, second.final.spins)
        assert first.energy == second.energy

    def test_never_below_ground_state(self, sk11):
        """Test that E* >= E0 on an enumerable instance."""
        ground, _ = brute_force_ground(sk11)
        assert solve(sk11, tau=0.5, p=1000).energy >= ground - 1e-9

    def test_record_stride_returns_trajectory(self, fielded4):
        """Test that record_stride yields a trajectory of the final schedule."""
        solution = solve(fielded4, tau=0.5, p=40, record_stride=10)
        np.testing.assert_array_equal(solution.trajectory.steps, [0, 10, 20, 30, 40])

    def test_solution_document(self, fielded4):
        """Test the serializable solution summary."""
        document = solve(fielded4, tau=0.5, p=20).to_dict()
        assert document["schedule"] == {"p": 20, "tau": 0.5}
        assert set(document) >= {"sigma", "energy", "converged", "warnings"}

    def test_zero_record_stride_rejected(self, fielded4):
        """Test that record_stride=0 is refused instead of recording every slice."""
        with pytest.raises(InvalidParameterError):
            solve(fielded4, tau=0.5, p=20, record_stride=0)

    def test_explicit_schedule_with_refinement_rejected(self, fielded4):
        """Test that an explicit schedule cannot be combined with refinement."""
        with pytest.raises(InvalidScheduleError):
            solve(
                fielded4,
                tau=0.5,
                p=20,
                refine_rounds=3,
                schedule=linear_schedule(20, 0.25),
            )

    def test_explicit_schedule_used_without_refinement(self, fielded4):
        """Test that an explicit schedule replaces the linear ramp."""
        schedule = linear_schedule(15, 0.3)
        solution = solve(fielded4, tau=0.5, p=20, schedule=schedule)
        final, _ = evolve(fielded4, schedule)
        assert solution.schedule is schedule
        np.testing.assert_array_equal(solution.final.spins, final.spins)

    def test_refined_final_matches_last_round(self, fielded4):
        """Test that the refined solution is the final state of the last round."""
        solution = solve(fielded4, tau=0.5, p=200, refine_rounds=6)
        result = refine(fielded4, 0.5, 200, max_rounds=6)
        final, _ = evolve(fielded4, result.schedule)
        assert solution.rounds == result.rounds
        assert solution.trajectory is None
        np.testing.assert_array_equal(solution.final.spins, final.spins)
        np.testing.assert_array_equal(result.final.spins, final.spins)

    def test_refined_trajectory_recorded(self, fielded4):
        """Test that recording after refinement covers the converged schedule."""
        solution = solve(fielded4, tau=0.5, p=200, refine_rounds=6, record_stride=50)
        assert solution.trajectory.p == solution.schedule.p
        np.testing.assert_array_equal(
            solution.trajectory.spins[-1], solution.final.spins
        )
