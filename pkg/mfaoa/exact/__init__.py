"""Exact reference oracles for small instances."""

from .enumeration import (
    basis_energies,
    bitstring_to_index,
    brute_force_ground,
    index_to_bitstring,
)
from .spectrum import SpectrumSlice, adiabatic_spectrum, driver_hamiltonian, minigap
from .statevector import (
    Statevector,
    bloch_vectors,
    factorized_probability,
    optimize_schedule,
    qaoa_bloch_trajectory,
    qaoa_expectation,
    qaoa_statevector,
)

__all__ = [
    "SpectrumSlice",
    "Statevector",
    "adiabatic_spectrum",
    "basis_energies",
    "bitstring_to_index",
    "bloch_vectors",
    "brute_force_ground",
    "driver_hamiltonian",
    "factorized_probability",
    "index_to_bitstring",
    "minigap",
    "optimize_schedule",
    "qaoa_bloch_trajectory",
    "qaoa_expectation",
    "qaoa_statevector",
]
