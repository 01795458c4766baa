"""Low-lying spectrum of the adiabatic Hamiltonian ``(1 - s) H_D + s H_P``."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from mfaoa.errors import InvalidParameterError
from mfaoa.problems import IsingProblem

from .enumeration import basis_energies, check_budget

logger = logging.getLogger(__name__)

MAX_SPECTRUM_SPINS = 14
DENSE_DIMENSION = 4096


@dataclass(frozen=True)
class SpectrumSlice:
    s: float
    levels: np.ndarray


def driver_hamiltonian(problem: IsingProblem) -> scipy.sparse.csr_matrix:
    """Sparse ``H_D = -sum_i Delta_i sigma^x_i`` in the computational basis."""
    n = problem.n
    size = 1 << n
    index = np.arange(size)
    rows, cols, values = [], [], []
    for i in range(n):
        rows.append(index)
        cols.append(index ^ (1 << (n - 1 - i)))
        values.append(np.full(size, -problem.driver[i]))
    return scipy.sparse.csr_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )


def _lowest_levels(hamiltonian, k: int, dense: bool) -> np.ndarray:
    if dense:
        matrix = hamiltonian.toarray()
        return scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, k - 1])
    levels = scipy.sparse.linalg.eigsh(
        hamiltonian, k=k, which="SA", return_eigenvectors=False
    )
    return np.sort(levels)


def adiabatic_spectrum(problem: IsingProblem, s_grid, k: int) -> list[SpectrumSlice]:
    """Lowest ``k`` eigenvalues of ``(1 - s) H_D + s H_P`` at each ``s``.

    Dense diagonalization up to 2^12 states, Lanczos above.

    Raises:
        BudgetExceededError: More than 14 spins
        InvalidParameterError: k outside [1, 2^N]
    """
    check_budget(problem.n, MAX_SPECTRUM_SPINS, "adiabatic_spectrum")
    size = 1 << problem.n
    if not 1 <= k <= size:
        raise InvalidParameterError(f"k must lie in [1, {size}], got {k}")

    driver = driver_hamiltonian(problem)
    diagonal = scipy.sparse.diags(basis_energies(problem))
    dense = size <= DENSE_DIMENSION or k >= size - 1

    slices = []
    for s in np.asarray(s_grid, dtype=float):
        hamiltonian = ((1.0 - s) * driver + s * diagonal).tocsr()
        slices.append(SpectrumSlice(float(s), _lowest_levels(hamiltonian, k, dense)))
    logger.debug("Computed %s spectrum slices for N=%s", len(slices), problem.n)
    return slices


def minigap(slices: list[SpectrumSlice]) -> tuple[float, float]:
    """Location and size of the smallest gap between the two lowest levels."""
    if not slices or slices[0].levels.shape[0] < 2:
        raise ValueError("minigap needs slices with at least two levels")
    gaps = np.array([sl.levels[1] - sl.levels[0] for sl in slices])
    index = int(np.argmin(gaps))
    return slices[index].s, float(gaps[index])
