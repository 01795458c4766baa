"""Step-count refinement, two-flip post-processing and the solve pipeline."""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from mfaoa.errors import InvalidParameterError, InvalidScheduleError
from mfaoa.problems import (
    IsingProblem,
    as_bitstring,
    break_symmetry,
    energy,
    restore_bitstring,
)

from .evolution import (
    SpinConfiguration,
    Trajectory,
    evolve,
    iterate,
    round_solution,
    step_angles,
)
from .schedule import Schedule, linear_schedule

logger = logging.getLogger(__name__)

SMOOTHNESS_ANGLE = 0.1


class RefineResult(NamedTuple):
    sigma: np.ndarray
    schedule: Schedule
    converged: bool
    rounds: int
    warnings: list[str]
    final: SpinConfiguration


@dataclass(eq=False)
class Solution:
    """Outcome of the mean-field pipeline on a full instance.

    ``sigma`` and ``energy`` refer to the full problem, even when the
    dynamics ran on the symmetry-broken reduction.
    """

    sigma: np.ndarray
    energy: float
    schedule: Schedule
    final: SpinConfiguration
    dynamics_problem: IsingProblem
    dynamics_sigma: np.ndarray
    converged: bool | None = None
    rounds: int = 1
    two_flip_improved: bool = False
    trajectory: Trajectory | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "energy": self.energy,
            "schedule": self.schedule.to_dict(),
            "converged": self.converged,
            "rounds": self.rounds,
            "two_flip_improved": self.two_flip_improved,
            "warnings": list(self.warnings),
        }


def _run_with_smoothness(
    problem: IsingProblem, schedule: Schedule
) -> tuple[SpinConfiguration, float]:
    """Evolve and return the final state with the largest per-step spin angle."""
    previous = None
    max_angle = 0.0
    for spins in iterate(problem, schedule):
        if previous is not None:
            max_angle = max(max_angle, float(np.max(step_angles(previous, spins))))
        previous = spins
    return SpinConfiguration(previous), max_angle


def refine(
    problem: IsingProblem, tau0: float, p0: int, max_rounds: int
) -> RefineResult:
    """Double p until the rounded solution repeats between rounds.

    A round whose largest per-step rotation of any spin reaches 0.1 rad counts
    as non-smooth, and the next round also halves tau.

    Returns:
        The last bitstring, its schedule and final configuration; ``converged``
        is False when ``max_rounds`` ran out before two consecutive rounds agreed
    """
    if max_rounds < 1:
        raise InvalidScheduleError(
            f"Refinement needs max_rounds >= 1, got {max_rounds}"
        )

    tau, p = float(tau0), int(p0)
    warnings: list[str] = []
    previous_sigma = None
    sigma = None
    schedule = None

    for round_index in range(1, max_rounds + 1):
        schedule = linear_schedule(p, tau)
        final, max_angle = _run_with_smoothness(problem, schedule)
        sigma = round_solution(final)
        logger.debug(
            "Refine round %s: p=%s tau=%s max step angle %.4f",
            round_index,
            p,
            tau,
            max_angle,
        )

        if previous_sigma is not None and np.array_equal(sigma, previous_sigma):
            return RefineResult(sigma, schedule, True, round_index, warnings, final)

        previous_sigma = sigma
        if max_angle >= SMOOTHNESS_ANGLE:
            logger.info(
                "Trajectory not smooth at tau=%s (max step %.3f rad); halving tau",
                tau,
                max_angle,
            )
            tau /= 2.0
        p *= 2

    message = (
        f"Refinement did not converge within {max_rounds} rounds "
        f"(last schedule p={schedule.p}, tau={schedule.tau})"
    )
    logger.warning(message)
    warnings.append(message)
    return RefineResult(sigma, schedule, False, max_rounds, warnings, final)


def two_flip_refine(problem: IsingProblem, sigma) -> np.ndarray:
    """Best simultaneous flip of two spins, if it lowers the energy.

    One steepest-descent pass over all pairs i < j. Flipping i and j changes
    the energy by ``2 s_i f_i + 2 s_j f_j - 4 J_ij s_i s_j`` with
    ``f = h + J s``.
    """
    bits = as_bitstring(sigma, problem.n)
    if problem.n < 2:
        return bits

    s = bits.astype(float)
    local = 2.0 * s * (problem.fields + problem.couplings @ s)
    delta = local[:, None] + local[None, :] - 4.0 * problem.couplings * np.outer(s, s)
    rows, cols = np.triu_indices(problem.n, k=1)
    best = int(np.argmin(delta[rows, cols]))

    candidate = bits.copy()
    candidate[rows[best]] *= -1
    candidate[cols[best]] *= -1
    if energy(problem, candidate) < energy(problem, bits):
        return candidate
    return bits


def solve(
    problem: IsingProblem,
    tau: float,
    p: int,
    refine_rounds: int = 0,
    two_flip: bool = False,
    break_symmetry_first: bool = True,
    record_stride: int | None = None,
    schedule: Schedule | None = None,
) -> Solution:
    """Symmetry-break, evolve (or refine), round and optionally two-flip.

    Args:
        problem: Full instance; energies are reported on it
        tau: Step size of the linear schedule
        p: Number of steps (starting value when refining)
        refine_rounds: Maximum refinement rounds; 0 or 1 runs a single evolve
        two_flip: Apply the pair-flip post-processing on the dynamics problem
        break_symmetry_first: Fix the last spin when the problem has no fields
        record_stride: Also return a trajectory of the final schedule
        schedule: Explicit angles replacing the linear ramp (no refinement)

    Raises:
        SymmetricInputError: Z2-symmetric problem and symmetry breaking disabled
        InvalidScheduleError: Explicit schedule combined with refinement
        InvalidParameterError: record_stride < 1
    """
    if schedule is not None and refine_rounds > 1:
        raise InvalidScheduleError(
            "An explicit schedule cannot be refined; pass refine_rounds <= 1"
        )
    if record_stride is not None and record_stride < 1:
        raise InvalidParameterError(
            f"Recording stride must be >= 1, got {record_stride}"
        )

    reduced = problem.is_symmetric and break_symmetry_first and problem.n >= 2
    dynamics_problem = break_symmetry(problem) if reduced else problem

    warnings: list[str] = []
    converged = None
    rounds = 1
    final = trajectory = None
    if refine_rounds > 1:
        result = refine(dynamics_problem, tau, p, refine_rounds)
        schedule, converged, rounds = result.schedule, result.converged, result.rounds
        warnings.extend(result.warnings)
        final = result.final
    elif schedule is None:
        schedule = linear_schedule(p, tau)

    # the last refinement round already ran this schedule
    if final is None or record_stride is not None:
        final, trajectory = evolve(
            dynamics_problem,
            schedule,
            record=record_stride is not None,
            stride=record_stride if record_stride is not None else 1,
        )
    dynamics_sigma = round_solution(final)

    improved = False
    if two_flip:
        flipped = two_flip_refine(dynamics_problem, dynamics_sigma)
        improved = not np.array_equal(flipped, dynamics_sigma)
        dynamics_sigma = flipped

    sigma = restore_bitstring(dynamics_sigma) if reduced else dynamics_sigma
    return Solution(
        sigma=sigma,
        energy=energy(problem, sigma),
        schedule=schedule,
        final=final,
        dynamics_problem=dynamics_problem,
        dynamics_sigma=dynamics_sigma,
        converged=converged,
        rounds=rounds,
        two_flip_improved=improved,
        trajectory=trajectory,
        warnings=warnings,
    )
