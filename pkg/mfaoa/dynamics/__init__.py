"""Mean-field AOA dynamics: schedules, evolution, rounding and refinement."""

from .evolution import (
    SpinConfiguration,
    Trajectory,
    driver_rotation,
    evolve,
    magnetization,
    problem_rotation,
    round_solution,
    step,
    step_angles,
)
from .refinement import RefineResult, Solution, refine, solve, two_flip_refine
from .schedule import Schedule, linear_schedule

__all__ = [
    "RefineResult",
    "Schedule",
    "Solution",
    "SpinConfiguration",
    "Trajectory",
    "driver_rotation",
    "evolve",
    "linear_schedule",
    "magnetization",
    "problem_rotation",
    "refine",
    "round_solution",
    "solve",
    "step",
    "step_angles",
    "two_flip_refine",
]
