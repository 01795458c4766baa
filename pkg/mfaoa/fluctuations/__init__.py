"""Gaussian fluctuations around the mean-field trajectory and hardness diagnostics."""

from .diagnostics import (
    HardnessReport,
    LyapunovTrace,
    count_sign_changes,
    exponent_peaks,
    fluctuation_trace,
    hardness_report,
    slice_stride,
)
from .operator import (
    FluctuationOperator,
    MagnonSpectrum,
    build_fluctuation_operator,
    coherent_state_energy,
    coherent_to_spins,
    magnon_spectrum,
    spins_to_coherent,
    tau3,
)
from .transfer import (
    Correlator,
    TransferMatrix,
    equal_time_correlator,
    lyapunov_spectrum,
    propagate_transfer,
)

__all__ = [
    "Correlator",
    "FluctuationOperator",
    "HardnessReport",
    "LyapunovTrace",
    "MagnonSpectrum",
    "TransferMatrix",
    "build_fluctuation_operator",
    "coherent_state_energy",
    "coherent_to_spins",
    "count_sign_changes",
    "equal_time_correlator",
    "exponent_peaks",
    "fluctuation_trace",
    "hardness_report",
    "lyapunov_spectrum",
    "magnon_spectrum",
    "propagate_transfer",
    "slice_stride",
    "spins_to_coherent",
    "tau3",
]
