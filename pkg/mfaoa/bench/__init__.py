"""Ensemble benchmarks and their statistical analysis."""

from .ensemble import (
    EnsembleRecord,
    EnsembleResult,
    compare_qaoa,
    observable,
    qaoa_ensemble,
    run_ensemble,
    summarize,
    tail_probability,
)
from .fits import (
    PARISI_ENERGY,
    FitReport,
    TailProbability,
    exponential_fit,
    fit_gumbel,
    fit_scaling,
    gumbel_cdf,
    gumbel_pdf,
    histogram,
    ks_distance,
    sample_gumbel,
    tail_from_excess,
)

__all__ = [
    "PARISI_ENERGY",
    "EnsembleRecord",
    "EnsembleResult",
    "FitReport",
    "TailProbability",
    "compare_qaoa",
    "exponential_fit",
    "fit_gumbel",
    "fit_scaling",
    "gumbel_cdf",
    "gumbel_pdf",
    "histogram",
    "ks_distance",
    "observable",
    "qaoa_ensemble",
    "run_ensemble",
    "sample_gumbel",
    "summarize",
    "tail_from_excess",
    "tail_probability",
]
