"""Seeded ensemble runs of the mean-field pipeline and the QAOA comparison.

Instance ``i`` of an ensemble uses seed ``seed0 + i``. Instances run in a
process pool; records are sorted by seed so results do not depend on the
completion order.
"""

import logging
import math
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from mfaoa.config import resolve_threads
from mfaoa.dynamics import Schedule, linear_schedule, solve
from mfaoa.errors import InvalidParameterError, OracleRequiredError
from mfaoa.exact import brute_force_ground, optimize_schedule, qaoa_statevector
from mfaoa.exact.enumeration import MAX_BRUTE_FORCE_SPINS, check_budget
from mfaoa.problems import break_symmetry, generate

from .fits import (
    FitReport,
    exponential_fit,
    fit_gumbel,
    fit_scaling,
    histogram,
    tail_from_excess,
)

logger = logging.getLogger(__name__)

ENERGY_SLACK = 1e-9


@dataclass
class EnsembleRecord:
    seed: int
    n: int
    e_star: float
    sigma_star: list[int]
    wallclock: float
    e_0: float | None = None
    converged: bool | None = None

    def to_dict(self, *, timings: bool = True) -> dict[str, Any]:
        row = {
            "seed": self.seed,
            "n": self.n,
            "e_star": self.e_star,
            "e_0": self.e_0,
            "sigma_star": self.sigma_star,
            "converged": self.converged,
        }
        if timings:
            row["wallclock"] = self.wallclock
        return row


@dataclass
class EnsembleResult:
    """Records of one ensemble (single kind and N) with shared metadata."""

    records: list[EnsembleRecord]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.seed)
        for record in self.records:
            if record.e_0 is not None and record.e_star < record.e_0 - ENERGY_SLACK:
                raise ValueError(
                    f"Seed {record.seed}: E*={record.e_star} below E0={record.e_0}"
                )

    @property
    def has_oracle(self) -> bool:
        return bool(self.records) and all(r.e_0 is not None for r in self.records)

    def energies(self) -> np.ndarray:
        return np.array([r.e_star for r in self.records])

    def ground_energies(self) -> np.ndarray:
        if not self.has_oracle:
            raise OracleRequiredError(
                "Ensemble lacks exact ground energies; rerun with the exact oracle"
            )
        return np.array([r.e_0 for r in self.records])

    def relative_excess(self) -> np.ndarray:
        """``(E* - E0) / |<E0>|`` per record."""
        e_0 = self.ground_energies()
        return (self.energies() - e_0) / abs(float(np.mean(e_0)))


@dataclass(frozen=True)
class _InstanceJob:
    kind: str
    n: int
    seed: int
    schedule: Schedule
    with_exact: bool
    two_flip: bool
    refine_rounds: int


def _run_instance(job: _InstanceJob) -> EnsembleRecord:
    started = time.perf_counter()
    problem = generate(job.kind, job.n, job.seed)
    solution = solve(
        problem,
        tau=job.schedule.tau,
        p=job.schedule.p,
        refine_rounds=job.refine_rounds,
        two_flip=job.two_flip,
        schedule=None if job.refine_rounds > 1 else job.schedule,
    )
    e_0 = brute_force_ground(problem)[0] if job.with_exact else None
    return EnsembleRecord(
        seed=job.seed,
        n=job.n,
        e_star=solution.energy,
        e_0=e_0,
        sigma_star=solution.sigma.tolist(),
        converged=solution.converged,
        wallclock=time.perf_counter() - started,
    )


def _map_jobs(function, jobs: Sequence, threads: int | None):
    workers = min(resolve_threads(threads), max(1, len(jobs)))
    if workers == 1:
        return [function(job) for job in jobs]
    chunksize = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, jobs, chunksize=chunksize))


def run_ensemble(
    kind: str,
    n: int,
    count: int,
    schedule: Schedule,
    seed0: int = 0,
    with_exact: bool = False,
    two_flip: bool = False,
    refine_rounds: int = 0,
    threads: int | None = None,
) -> EnsembleResult:
    """Solve ``count`` seeded instances of size ``n``.

    Raises:
        InvalidParameterError: count < 1
        BudgetExceededError: ``with_exact`` for more than 26 spins
    """
    if count < 1:
        raise InvalidParameterError(f"Ensembles need count >= 1, got {count}")
    if with_exact:
        check_budget(n, MAX_BRUTE_FORCE_SPINS, "run_ensemble with exact oracle")

    jobs = [
        _InstanceJob(kind, n, seed0 + i, schedule, with_exact, two_flip, refine_rounds)
        for i in range(count)
    ]
    logger.info(
        "Running %s %s instances at N=%s (p=%s, tau=%s, exact=%s)",
        count,
        kind,
        n,
        schedule.p,
        schedule.tau,
        with_exact,
    )
    records = _map_jobs(_run_instance, jobs, threads)

    unconverged = sum(1 for r in records if r.converged is False)
    if unconverged:
        logger.warning("%s of %s instances did not converge", unconverged, count)

    return EnsembleResult(
        records=records,
        metadata={
            "kind": kind,
            "n": n,
            "count": count,
            "seed0": seed0,
            "schedule": schedule.to_dict(),
            "two_flip": two_flip,
            "refine_rounds": refine_rounds,
            "with_exact": with_exact,
        },
    )


def tail_probability(ensemble: EnsembleResult, thresholds):
    """Fraction of records with ``(E* - E0) / |<E0>| > eps`` per threshold.

    Raises:
        OracleRequiredError: Some record has no exact ground energy
    """
    return tail_from_excess(ensemble.relative_excess(), thresholds)


@dataclass(frozen=True)
class _QAOAJob:
    n: int
    seed: int
    layers: int
    tau: float
    sweeps: int


def _run_qaoa_instance(job: _QAOAJob) -> dict[str, Any]:
    problem = break_symmetry(generate("partition", job.n, job.seed))
    schedule = linear_schedule(job.layers, job.tau)
    _, linear_cost = qaoa_statevector(problem, schedule)
    row = {"seed": job.seed, "n": job.n, "p": job.layers, "linear": linear_cost}
    if job.sweeps > 0:
        _, optimized_cost = optimize_schedule(problem, schedule, sweeps=job.sweeps)
        row["optimized"] = optimized_cost
    return row


def qaoa_ensemble(
    n: int,
    count: int,
    layers: int,
    seed0: int = 0,
    tau: float = 0.5,
    optimize_sweeps: int = 0,
    threads: int | None = None,
) -> list[dict[str, Any]]:
    """QAOA cost ``<H_P>`` on symmetry-broken partition instances.

    The linear schedule is always evaluated; with ``optimize_sweeps > 0``
    coordinate descent from the linear start is reported as well.
    """
    jobs = [_QAOAJob(n, seed0 + i, layers, tau, optimize_sweeps) for i in range(count)]
    rows = _map_jobs(_run_qaoa_instance, jobs, threads)
    return sorted(rows, key=lambda row: row["seed"])


def _safe_fit(label: str, function, *args, **kwargs) -> dict[str, Any]:
    try:
        report: FitReport = function(*args, **kwargs)
        return report.to_dict()
    except (ValueError, ArithmeticError) as e:
        logger.warning("Skipping %s fit: %s", label, e)
        return {"error": str(e)}


def observable(kind: str, result: EnsembleResult) -> np.ndarray:
    """Energy density E*/N for SK, square-root cost for partitioning."""
    energies = result.energies()
    if kind == "partition":
        return np.sqrt(np.maximum(energies, 0.0))
    return energies / result.metadata["n"]


def summarize(
    kind: str,
    results: Sequence[EnsembleResult],
    gumbel_m: int = 6,
    thresholds: np.ndarray | None = None,
) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    """Per-N summary rows and all fits of a benchmark sweep."""
    if thresholds is None:
        thresholds = np.linspace(0.0, 0.2, 41)

    rows = []
    per_n: dict[str, Any] = {}
    for result in results:
        n = result.metadata["n"]
        values = observable(kind, result)
        row = {
            "n": n,
            "count": len(result.records),
            "mean": float(np.mean(values)),
            "std": float(np.std(values, ddof=1)) if values.shape[0] > 1 else 0.0,
        }
        fits: dict[str, Any] = {"histogram": histogram(values)}
        if kind == "sk":
            fits["gumbel"] = _safe_fit("Gumbel", fit_gumbel, values, m=gumbel_m)
        else:
            fits["exponential"] = _safe_fit("exponential", exponential_fit, values)

        if result.has_oracle:
            e_0 = result.ground_energies()
            row["mean_e0"] = float(np.mean(e_0))
            row["success_rate"] = float(
                np.mean(np.abs(result.energies() - e_0) <= ENERGY_SLACK)
            )
            tail = tail_probability(result, thresholds)
            fits["tail"] = {
                "thresholds": tail.thresholds,
                "probabilities": tail.probabilities,
                "slope": tail.slope,
                "slope_error": tail.slope_error,
                "reference_slope": -2.0 * math.pi * math.sqrt(n),
            }
        rows.append(row)
        per_n[str(n)] = fits

    pairs = [(row["n"], row["mean"]) for row in rows]
    std_pairs = [(row["n"], row["std"]) for row in rows]
    model = "sk" if kind == "sk" else "power-law"
    document = {
        "per_n": per_n,
        "scaling": _safe_fit("scaling", fit_scaling, pairs, model=model),
        "std_scaling": _safe_fit("std scaling", fit_scaling, std_pairs, "power-law"),
    }
    return rows, document


def compare_qaoa(
    qaoa_rows: Sequence[dict[str, Any]], results: Sequence[EnsembleResult]
) -> dict[str, Any]:
    """Mean QAOA cost per (p, N) against the mean-field mean energy per N."""
    mean_field = {
        r.metadata["n"]: float(np.mean(r.energies())) for r in results if r.records
    }
    by_layers: dict[int, dict[int, list[float]]] = {}
    for row in qaoa_rows:
        cost = row.get("optimized", row["linear"])
        by_layers.setdefault(row["p"], {}).setdefault(row["n"], []).append(cost)

    comparison: dict[str, Any] = {"mean_field": mean_field, "qaoa": {}}
    for layers, per_n in sorted(by_layers.items()):
        means = {n: float(np.mean(costs)) for n, costs in sorted(per_n.items())}
        comparison["qaoa"][str(layers)] = {
            "means": means,
            "fit": _safe_fit("QAOA growth", fit_scaling, list(means.items()), "growth"),
            "mean_field_below": all(
                mean_field[n] < means[n] for n in means if n in mean_field
            ),
        }
    return comparison
