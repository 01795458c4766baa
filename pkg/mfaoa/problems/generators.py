"""Seeded instance generators for the SK model and number partitioning.

Both generators draw from ``numpy.random.default_rng(seed)`` (PCG64), so an
instance is reproducible from its seed on any platform.

Stream order:
- SK: one ``standard_normal`` draw per coupling of the strict upper triangle,
  row-major (J_01, J_02, ..., J_12, ...), scaled by 1/sqrt(n).
- Partition: ``random(n)`` uniforms U, weights ``a = 1 - U`` in (0, 1].
"""

import logging
from dataclasses import dataclass

import numpy as np

from mfaoa.errors import InvalidInstanceError

from .ising import IsingProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PartitionInstance:
    """Number-partitioning weights and the Ising problem they induce."""

    weights: np.ndarray
    problem: IsingProblem

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def cost(self, sigma) -> float:
        """Squared partition discrepancy ``(sum a_i s_i)**2``."""
        return float(np.dot(self.weights, np.asarray(sigma, dtype=float)) ** 2)


def _check_size(n: int):
    if int(n) != n or n < 2:
        raise InvalidInstanceError(f"Instance generators need n >= 2, got {n}")


def sk_instance(n: int, seed: int) -> IsingProblem:
    """Sherrington-Kirkpatrick instance with Gaussian couplings of variance 1/n."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    couplings = np.zeros((n, n))
    couplings[rows, cols] = rng.standard_normal(rows.shape[0]) / np.sqrt(n)
    couplings[cols, rows] = couplings[rows, cols]
    logger.debug("Generated SK instance n=%s seed=%s", n, seed)
    return IsingProblem(
        couplings=couplings,
        fields=np.zeros(n),
        energy_offset=0.0,
        kind="sk",
        seed=seed,
    )


def partition_from_weights(weights, seed: int | None = None) -> PartitionInstance:
    """Ising encoding of the squared partition cost for given weights.

    ``(sum a_i s_i)**2 = sum a_i**2 + sum_{i<j} 2 a_i a_j s_i s_j``, so
    J_ij = -2 a_i a_j and the offset carries ``sum a_i**2``.
    """
    a = np.asarray(weights, dtype=float).reshape(-1)
    _check_size(a.shape[0])
    if np.any(a <= 0.0) or np.any(a > 1.0):
        raise InvalidInstanceError("Partition weights must lie in (0, 1]")

    couplings = -2.0 * np.outer(a, a)
    np.fill_diagonal(couplings, 0.0)
    problem = IsingProblem(
        couplings=couplings,
        fields=np.zeros(a.shape[0]),
        energy_offset=float(np.sum(a * a)),
        kind="partition",
        seed=seed,
    )
    weights_ro = a.copy()
    weights_ro.setflags(write=False)
    return PartitionInstance(weights=weights_ro, problem=problem)


def partition_instance(n: int, seed: int) -> PartitionInstance:
    """Random partition instance with weights uniform on (0, 1]."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    weights = 1.0 - rng.random(n)
    return partition_from_weights(weights, seed=seed)


def custom_instance(
    couplings,
    fields=None,
    driver=None,
    energy_offset: float = 0.0,
) -> IsingProblem:
    """Validated user-supplied instance."""
    couplings = np.asarray(couplings, dtype=float)
    if couplings.ndim != 2:
        raise InvalidInstanceError("Couplings must be a square matrix")
    n = couplings.shape[0]
    return IsingProblem(
        couplings=couplings,
        fields=np.zeros(n) if fields is None else fields,
        driver=driver,
        energy_offset=energy_offset,
        kind="custom",
    )


def generate(kind: str, n: int, seed: int) -> IsingProblem:
    """Dispatch to the generator for ``kind``."""
    if kind == "sk":
        return sk_instance(n, seed)
    if kind == "partition":
        return partition_instance(n, seed).problem
    raise InvalidInstanceError(f"Unknown instance kind: {kind}")
