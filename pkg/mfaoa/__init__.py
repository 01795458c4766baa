"""Mean-field approximate optimization: dynamics, diagnostics and benchmarks."""

from .dynamics import Schedule, Solution, evolve, linear_schedule, solve
from .errors import MFAOAError
from .problems import IsingProblem, generate

__version__ = "0.1.0"

__all__ = [
    "IsingProblem",
    "MFAOAError",
    "Schedule",
    "Solution",
    "__version__",
    "evolve",
    "generate",
    "linear_schedule",
    "solve",
]
