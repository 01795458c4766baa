"""Exhaustive enumeration of the 2^N computational basis.

Basis index b encodes spin i (0-based) in bit ``N - 1 - i``, so spin 0 is the
most significant bit, and bit value 0 means sigma = +1.
"""

import logging

import numpy as np

from mfaoa.errors import BudgetExceededError
from mfaoa.problems import IsingProblem

logger = logging.getLogger(__name__)

MAX_BRUTE_FORCE_SPINS = 26
CHUNK_BITS = 16


def check_budget(n: int, limit: int, what: str):
    if n > limit:
        raise BudgetExceededError(f"{what} supports at most {limit} spins, got {n}")


def index_to_bitstring(indices, n: int) -> np.ndarray:
    """Spin strings (K x N, int8) for basis indices."""
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def bitstring_to_index(sigma) -> int:
    bits = (1 - np.asarray(sigma, dtype=np.int64)) // 2
    return int(bits @ (1 << np.arange(bits.shape[0] - 1, -1, -1, dtype=np.int64)))


def _chunk_energies(problem: IsingProblem, start: int, stop: int) -> np.ndarray:
    spins = index_to_bitstring(np.arange(start, stop), problem.n).astype(float)
    quadratic = 0.5 * np.sum((spins @ problem.couplings) * spins, axis=1)
    return problem.energy_offset - spins @ problem.fields - quadratic


def _chunks(n: int):
    size = 1 << n
    chunk = 1 << min(CHUNK_BITS, n)
    for start in range(0, size, chunk):
        yield start, min(start + chunk, size)


def basis_energies(problem: IsingProblem) -> np.ndarray:
    """Diagonal of the problem Hamiltonian over all 2^N basis states."""
    check_budget(problem.n, MAX_BRUTE_FORCE_SPINS, "basis_energies")
    return np.concatenate(
        [_chunk_energies(problem, start, stop) for start, stop in _chunks(problem.n)]
    )


def brute_force_ground(problem: IsingProblem) -> tuple[float, np.ndarray]:
    """Exact ground energy and the lowest-index string attaining it.

    Raises:
        BudgetExceededError: More than 26 spins
    """
    check_budget(problem.n, MAX_BRUTE_FORCE_SPINS, "brute_force_ground")
    best_energy = np.inf
    best_index = -1
    for start, stop in _chunks(problem.n):
        chunk = _chunk_energies(problem, start, stop)
        local = int(np.argmin(chunk))
        if chunk[local] < best_energy:
            best_energy = float(chunk[local])
            best_index = start + local

    logger.debug(
        "Brute force over 2^%s strings: E0=%s at index %s",
        problem.n,
        best_energy,
        best_index,
    )
    return best_energy, index_to_bitstring([best_index], problem.n)[0]
