"""Statevector QAOA with the same layer ordering as the mean-field dynamics.

Each layer applies the problem phase ``exp(-i gamma_k H_P)`` and then the
mixer ``exp(-i beta_k H_D)`` to ``|+>^N``. With ``H_D = -sum Delta_i X_i`` the
mixer factorizes into ``cos(beta Delta_i) + i sin(beta Delta_i) X_i`` per
qubit.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from mfaoa.dynamics import Schedule, SpinConfiguration
from mfaoa.problems import IsingProblem, as_bitstring

from .enumeration import basis_energies, check_budget

logger = logging.getLogger(__name__)

MAX_STATEVECTOR_SPINS = 20


@dataclass(frozen=True, eq=False)
class Statevector:
    """Amplitudes over the 2^N basis (spin 0 most significant, +1 is bit 0)."""

    amplitudes: np.ndarray

    @property
    def n(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def bloch_vectors(self) -> np.ndarray:
        return bloch_vectors(self.amplitudes)


def bloch_vectors(amplitudes: np.ndarray) -> np.ndarray:
    """Single-qubit ``<X>, <Y>, <Z>`` for every qubit, as an N x 3 array."""
    n = int(amplitudes.shape[0]).bit_length() - 1
    tensor = amplitudes.reshape((2,) * n)
    result = np.empty((n, 3))
    for i in range(n):
        pair = np.moveaxis(tensor, i, 0).reshape(2, -1)
        coherence = np.vdot(pair[0], pair[1])
        result[i, 0] = 2.0 * coherence.real
        result[i, 1] = 2.0 * coherence.imag
        result[i, 2] = np.vdot(pair[0], pair[0]).real - np.vdot(pair[1], pair[1]).real
    return result


def _apply_mixer(tensor: np.ndarray, driver: np.ndarray, beta: float) -> np.ndarray:
    for i, amplitude in enumerate(driver):
        c, s = np.cos(beta * amplitude), np.sin(beta * amplitude)
        moved = np.moveaxis(tensor, i, 0)
        zero, one = moved[0].copy(), moved[1].copy()
        moved[0] = c * zero + 1j * s * one
        moved[1] = c * one + 1j * s * zero
    return tensor


def _layers(problem: IsingProblem, schedule: Schedule, diagonal: np.ndarray):
    n = problem.n
    state = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    yield state
    for gamma, beta in zip(schedule.gammas, schedule.betas, strict=True):
        state = state * np.exp(-1j * gamma * diagonal)
        tensor = _apply_mixer(state.reshape((2,) * n), problem.driver, beta)
        state = tensor.reshape(-1)
        yield state


def qaoa_statevector(
    problem: IsingProblem, schedule: Schedule
) -> tuple[Statevector, float]:
    """Final QAOA state and its problem-energy expectation.

    Raises:
        BudgetExceededError: More than 20 spins
    """
    check_budget(problem.n, MAX_STATEVECTOR_SPINS, "qaoa_statevector")
    diagonal = basis_energies(problem)
    state = None
    for state in _layers(problem, schedule, diagonal):
        pass
    expectation = float(np.sum(np.abs(state) ** 2 * diagonal))
    return Statevector(state), expectation


def qaoa_bloch_trajectory(problem: IsingProblem, schedule: Schedule) -> np.ndarray:
    """Bloch vectors of every qubit after each layer, shape (p + 1) x N x 3."""
    check_budget(problem.n, MAX_STATEVECTOR_SPINS, "qaoa_bloch_trajectory")
    diagonal = basis_energies(problem)
    return np.stack(
        [bloch_vectors(state) for state in _layers(problem, schedule, diagonal)]
    )


def qaoa_expectation(problem: IsingProblem, gammas, betas) -> float:
    schedule = Schedule(p=len(gammas), tau=1.0, gammas=gammas, betas=betas)
    return qaoa_statevector(problem, schedule)[1]


def factorized_probability(config: SpinConfiguration, sigma) -> float:
    """Product-state probability ``prod_i (1 + s_i n_i^z) / 2`` of a string."""
    bits = as_bitstring(sigma, config.n)
    return float(np.prod(0.5 * (1.0 + bits * config.z)))


def optimize_schedule(
    problem: IsingProblem, schedule: Schedule, sweeps: int = 1
) -> tuple[Schedule, float]:
    """Coordinate descent on the QAOA angles, starting from ``schedule``.

    Each coordinate is minimized by a bounded scalar search within ``tau`` of
    its current value. Returns the improved schedule and its expectation.
    """
    check_budget(problem.n, MAX_STATEVECTOR_SPINS, "optimize_schedule")
    diagonal = basis_energies(problem)
    angles = np.concatenate([schedule.gammas, schedule.betas])
    p = schedule.p

    def objective(values: np.ndarray) -> float:
        trial = Schedule(p=p, tau=schedule.tau, gammas=values[:p], betas=values[p:])
        state = None
        for state in _layers(problem, trial, diagonal):
            pass
        return float(np.sum(np.abs(state) ** 2 * diagonal))

    best = objective(angles)
    for sweep in range(sweeps):
        for index in range(angles.shape[0]):
            current = angles[index]

            def along(value, index=index):
                trial = angles.copy()
                trial[index] = value
                return objective(trial)

            result = minimize_scalar(
                along,
                bounds=(current - schedule.tau, current + schedule.tau),
                method="bounded",
            )
            if result.fun < best:
                angles[index] = result.x
                best = float(result.fun)
        logger.debug("Coordinate descent sweep %s: <H_P> = %s", sweep + 1, best)

    optimized = Schedule(p=p, tau=schedule.tau, gammas=angles[:p], betas=angles[p:])
    return optimized, best
