"""Ising problem instances, generators and the Z2 symmetry-breaking transform."""

from .generators import (
    PartitionInstance,
    custom_instance,
    generate,
    partition_from_weights,
    partition_instance,
    sk_instance,
)
from .ising import (
    IsingProblem,
    as_bitstring,
    break_symmetry,
    energies,
    energy,
    restore_bitstring,
)

__all__ = [
    "IsingProblem",
    "PartitionInstance",
    "as_bitstring",
    "break_symmetry",
    "custom_instance",
    "energies",
    "energy",
    "generate",
    "partition_from_weights",
    "partition_instance",
    "restore_bitstring",
    "sk_instance",
]
