"""Ising optimization instances and their classical energy."""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from mfaoa.errors import (
    DimensionError,
    InvalidInstanceError,
    SymmetryAlreadyBrokenError,
)

ProblemKind = Literal["sk", "partition", "custom"]


def _frozen(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """Problem Hamiltonian ``offset - sum h_i s_i - sum_{i<j} J_ij s_i s_j``.

    Arrays are copied and made read-only on construction so a problem can be
    shared between threads and worker processes.

    Attributes:
        couplings: Symmetric N x N coupling matrix J with zero diagonal
        fields: Local fields h
        driver: Transverse driver amplitudes, all positive
        energy_offset: Constant added to every energy
        kind: Generator family ("sk", "partition" or "custom")
        seed: Seed the instance was generated from, if any
    """

    couplings: np.ndarray
    fields: np.ndarray
    driver: np.ndarray | None = None
    energy_offset: float = 0.0
    kind: ProblemKind = "custom"
    seed: int | None = None

    def __post_init__(self):
        couplings = np.asarray(self.couplings, dtype=float)
        fields = np.asarray(self.fields, dtype=float).reshape(-1)
        n = fields.shape[0]

        if n < 1:
            raise InvalidInstanceError("An Ising problem needs at least one spin")
        if couplings.shape != (n, n):
            raise InvalidInstanceError(
                f"Couplings have shape {couplings.shape}, expected {(n, n)}"
            )
        if not np.array_equal(couplings, couplings.T):
            raise InvalidInstanceError("Couplings must be exactly symmetric")
        if np.any(np.diag(couplings) != 0.0):
            raise InvalidInstanceError("Couplings must have a zero diagonal")

        driver = np.ones(n) if self.driver is None else self.driver
        driver = np.asarray(driver, dtype=float).reshape(-1)
        if driver.shape != (n,):
            raise InvalidInstanceError(
                f"Driver has length {driver.shape[0]}, expected {n}"
            )
        if np.any(driver <= 0.0):
            raise InvalidInstanceError("Driver amplitudes must be positive")

        for name, values in (("couplings", couplings), ("fields", fields)):
            if not np.all(np.isfinite(values)):
                raise InvalidInstanceError(f"Non-finite entries in {name}")

        object.__setattr__(self, "couplings", _frozen(couplings))
        object.__setattr__(self, "fields", _frozen(fields))
        object.__setattr__(self, "driver", _frozen(driver))
        object.__setattr__(self, "energy_offset", float(self.energy_offset))

    @property
    def n(self) -> int:
        return self.fields.shape[0]

    @property
    def is_symmetric(self) -> bool:
        """True when every local field is exactly zero (Z2-symmetric)."""
        return not np.any(self.fields)


def as_bitstring(sigma, n: int | None = None) -> np.ndarray:
    """Validate a +/-1 spin string and return it as an int8 array.

    Raises:
        DimensionError: Wrong length or entries other than +1/-1
    """
    bits = np.asarray(sigma).reshape(-1)
    if n is not None and bits.shape[0] != n:
        raise DimensionError(f"Bitstring has length {bits.shape[0]}, expected {n}")
    if not np.all(np.abs(bits) == 1):
        raise DimensionError("Bitstring entries must be +1 or -1")
    return bits.astype(np.int8)


def energy(problem: IsingProblem, sigma) -> float:
    """Classical energy of a single spin string."""
    bits = as_bitstring(sigma, problem.n).astype(float)
    # J is symmetric with zero diagonal, so half the quadratic form is the i<j sum
    quadratic = 0.5 * bits @ problem.couplings @ bits
    return float(problem.energy_offset - problem.fields @ bits - quadratic)


def energies(problem: IsingProblem, sigmas) -> np.ndarray:
    """Energies of a batch of spin strings given as a K x N array."""
    bits = np.asarray(sigmas, dtype=float)
    if bits.ndim != 2 or bits.shape[1] != problem.n:
        raise DimensionError(
            f"Expected a K x {problem.n} array of spin strings, got {bits.shape}"
        )
    quadratic = 0.5 * np.einsum("ki,ij,kj->k", bits, problem.couplings, bits)
    return problem.energy_offset - bits @ problem.fields - quadratic


def break_symmetry(problem: IsingProblem) -> IsingProblem:
    """Fix the last spin to +1 and fold its couplings into local fields.

    Raises:
        SymmetryAlreadyBrokenError: The problem already has nonzero fields
        InvalidInstanceError: Fewer than two spins
    """
    if not problem.is_symmetric:
        raise SymmetryAlreadyBrokenError(
            "Problem already has nonzero local fields; skip symmetry breaking"
        )
    if problem.n < 2:
        raise InvalidInstanceError("Symmetry breaking needs at least two spins")

    return IsingProblem(
        couplings=problem.couplings[:-1, :-1],
        fields=problem.couplings[:-1, -1],
        driver=problem.driver[:-1],
        energy_offset=problem.energy_offset,
        kind=problem.kind,
        seed=problem.seed,
    )


def restore_bitstring(sigma) -> np.ndarray:
    """Append the fixed last spin (+1) to a reduced-problem bitstring."""
    bits = as_bitstring(sigma)
    return np.append(bits, np.int8(1)).astype(np.int8)
