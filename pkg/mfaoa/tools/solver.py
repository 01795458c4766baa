"""Solver operations exposed as tools."""

import json
import logging
from typing import Any

from mfaoa.dynamics import solve
from mfaoa.exact import brute_force_ground
from mfaoa.fluctuations import fluctuation_trace, hardness_report
from mfaoa.formats import dumps, instance_from_dict, instance_to_dict
from mfaoa.problems import generate

from .base import ToolServer, tool

logger = logging.getLogger(__name__)


def _plain(document: Any) -> Any:
    """Round-trip through the array-aware encoder into plain JSON types."""
    return json.loads(dumps(document, indent=None))


class SolverToolServer(ToolServer):
    """Instance generation, mean-field solving and diagnostics as tools."""

    @tool("generate_instance", "Generate a seeded SK or partition instance")
    def generate_instance(self, kind: str, n: int, seed: int = 0) -> dict:
        return _plain(instance_to_dict(generate(kind, n, seed)))

    @tool("solve_instance", "Run the mean-field AOA on an instance document")
    def solve_instance(
        self,
        instance: dict,
        tau: float = 0.5,
        p: int = 1000,
        two_flip: bool = False,
        refine_rounds: int = 0,
    ) -> dict:
        problem = instance_from_dict(instance)
        solution = solve(
            problem, tau=tau, p=p, refine_rounds=refine_rounds, two_flip=two_flip
        )
        logger.info(
            "Solved %s instance n=%s: E*=%s", problem.kind, problem.n, solution.energy
        )
        return _plain(solution.to_dict())

    @tool("ground_state", "Exact ground state by enumeration (N <= 26)")
    def ground_state(self, instance: dict) -> dict:
        energy, sigma = brute_force_ground(instance_from_dict(instance))
        return _plain({"energy": energy, "sigma": sigma})

    @tool("hardness", "Lyapunov hardness report along the mean-field trajectory")
    def hardness(
        self, instance: dict, tau: float = 0.5, p: int = 1000, slices: int = 500
    ) -> dict:
        problem = instance_from_dict(instance)
        solution = solve(problem, tau=tau, p=p, record_stride=1)
        trace = fluctuation_trace(
            solution.dynamics_problem,
            solution.trajectory,
            solution.dynamics_sigma,
            max_slices=slices,
        )
        report = hardness_report(trace, problem.n)
        return _plain(
            {
                "report": report.to_dict(),
                "energy": solution.energy,
                "sigma": solution.sigma,
                "warnings": trace.warnings,
            }
        )
