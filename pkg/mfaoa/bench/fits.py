"""Scaling fits, extreme-value (Gumbel) fits and tail statistics of ensembles.

Scaling laws are fitted by ordinary least squares in log space with equal
weights; standard errors come from the linearized fit. The Gumbel fit is a
maximum-likelihood fit with the location profiled out in closed form.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar
from scipy.special import gammainc, gammaln, logsumexp

from mfaoa.errors import DegenerateFitError

logger = logging.getLogger(__name__)

PARISI_ENERGY = -0.763
MIN_SCALING_POINTS = 4
MIN_GUMBEL_SAMPLES = 100

ScalingModel = Literal["sk", "power-law", "growth"]


@dataclass
class FitReport:
    model: str
    params: dict[str, float]
    errors: dict[str, float] = field(default_factory=dict)
    statistic: dict[str, float] = field(default_factory=dict)
    converged: bool = True
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "params": self.params,
            "errors": self.errors,
            "statistic": self.statistic,
            "converged": self.converged,
            "note": self.note,
        }


def fit_scaling(
    pairs: Sequence[tuple[float, float]],
    model: ScalingModel = "sk",
    asymptote: float = PARISI_ENERGY,
) -> FitReport:
    """Fit a power law in N to ensemble means.

    Models:
        sk: ``y = asymptote + c N^-omega`` with the asymptote held fixed
        power-law: ``y = A N^-omega``
        growth: ``y = A N^omega_prime``

    Raises:
        DegenerateFitError: Fewer than 4 points, non-positive values in log
            space, or a single distinct N
    """
    data = np.asarray(pairs, dtype=float)
    if data.ndim != 2 or data.shape[0] < MIN_SCALING_POINTS:
        raise DegenerateFitError(
            f"Scaling fits need at least {MIN_SCALING_POINTS} (N, y) points"
        )
    n_values, y_values = data[:, 0], data[:, 1]
    residual = y_values - asymptote if model == "sk" else y_values

    if np.any(residual <= 0.0) or np.any(n_values <= 0.0):
        raise DegenerateFitError(
            f"Model {model!r} needs positive values in log space, got {residual}"
        )
    if np.unique(n_values).shape[0] < 2:
        raise DegenerateFitError("Scaling fit needs at least two distinct N")

    log_n, log_y = np.log(n_values), np.log(residual)
    fit = stats.linregress(log_n, log_y)
    if not (np.isfinite(fit.slope) and np.isfinite(fit.intercept)):
        raise DegenerateFitError("Log-space regression is singular")

    amplitude = math.exp(fit.intercept)
    amplitude_error = amplitude * fit.intercept_stderr
    statistic = {"r_squared": float(fit.rvalue**2)}

    if model == "sk":
        return FitReport(
            model="sk",
            params={"c": amplitude, "omega": -fit.slope, "epsilon_p": asymptote},
            errors={"c": amplitude_error, "omega": fit.stderr},
            statistic=statistic,
        )
    if model == "power-law":
        return FitReport(
            model="power-law",
            params={"A": amplitude, "omega": -fit.slope},
            errors={"A": amplitude_error, "omega": fit.stderr},
            statistic=statistic,
        )
    if model == "growth":
        return FitReport(
            model="growth",
            params={"A": amplitude, "omega_prime": fit.slope},
            errors={"A": amplitude_error, "omega_prime": fit.stderr},
            statistic=statistic,
        )
    raise ValueError(f"Unknown scaling model: {model}")


def gumbel_log_norm(m: int, v: float) -> float:
    """``log w`` with ``w = m^m / (v Gamma(m))``."""
    return m * math.log(m) - math.log(v) - float(gammaln(m))


def gumbel_pdf(x, m: int, u: float, v: float) -> np.ndarray:
    """Density ``w exp(m y - m e^y)`` with ``y = (x - u) / v``."""
    y = (np.asarray(x, dtype=float) - u) / v
    return np.exp(gumbel_log_norm(m, v) + m * y - m * np.exp(y))


def gumbel_cdf(x, m: int, u: float, v: float) -> np.ndarray:
    """``m e^y`` is Gamma(m) distributed, so the CDF is a regularized gamma."""
    y = (np.asarray(x, dtype=float) - u) / v
    return gammainc(m, m * np.exp(y))


def sample_gumbel(
    m: int, u: float, v: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    return u + v * np.log(rng.gamma(m, size=size) / m)


def _profile_location(values: np.ndarray, v: float) -> float:
    return v * (float(logsumexp(values / v)) - math.log(values.shape[0]))


def _negative_log_likelihood(values: np.ndarray, m: int, u: float, v: float) -> float:
    y = (values - u) / v
    return -(values.shape[0] * gumbel_log_norm(m, v) + np.sum(m * y - m * np.exp(y)))


def _observed_information(values: np.ndarray, m: int, u: float, v: float) -> np.ndarray:
    y = (values - u) / v
    first = m - m * np.exp(y)
    second = -m * np.exp(y)
    n = values.shape[0]
    uu = (m / v**2) * np.sum(np.exp(y))
    uv = -(np.sum(first) + np.sum(second * y)) / v**2
    vv = -(n + 2.0 * np.sum(first * y) + np.sum(second * y * y)) / v**2
    return np.array([[uu, uv], [uv, vv]])


def fit_gumbel(values, m: int = 6) -> FitReport:
    """Maximum-likelihood fit of ``g_m`` with ``m`` held fixed.

    Raises:
        DegenerateFitError: Fewer than 100 samples or constant data
    """
    data = np.asarray(values, dtype=float).reshape(-1)
    if data.shape[0] < MIN_GUMBEL_SAMPLES:
        raise DegenerateFitError(
            f"Gumbel fit needs at least {MIN_GUMBEL_SAMPLES} samples, "
            f"got {data.shape[0]}"
        )
    spread = float(np.std(data))
    if spread == 0.0 or not np.isfinite(spread):
        raise DegenerateFitError("Gumbel fit is undefined for constant data")

    def profile(v: float) -> float:
        return _negative_log_likelihood(data, m, _profile_location(data, v), v)

    result = minimize_scalar(
        profile, bounds=(1e-3 * spread, 1e3 * spread), method="bounded"
    )
    v = float(result.x)
    u = _profile_location(data, v)
    converged = bool(result.success)
    note = ""

    information = _observed_information(data, m, u, v)
    try:
        covariance = np.linalg.inv(information)
        variances = np.diag(covariance)
        if np.any(variances <= 0.0):
            raise np.linalg.LinAlgError("observed information is not positive")
        errors = {"u": float(np.sqrt(variances[0])), "v": float(np.sqrt(variances[1]))}
    except np.linalg.LinAlgError as e:
        converged = False
        note = f"standard errors unavailable: {e}"
        errors = {"u": math.nan, "v": math.nan}

    if not converged:
        logger.warning("Gumbel fit did not converge: %s", note or result.message)

    ks = stats.kstest(data, lambda x: gumbel_cdf(x, m, u, v))
    return FitReport(
        model="gumbel",
        params={"m": m, "u": u, "v": v, "w": math.exp(gumbel_log_norm(m, v))},
        errors=errors,
        statistic={
            "ks_distance": float(ks.statistic),
            "ks_pvalue": float(ks.pvalue),
            "nll": float(result.fun),
        },
        converged=converged,
        note=note,
    )


def ks_distance(values, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    return float(stats.kstest(np.asarray(values, dtype=float), cdf).statistic)


class TailProbability(NamedTuple):
    thresholds: np.ndarray
    probabilities: np.ndarray
    slope: float
    intercept: float
    slope_error: float


def tail_from_excess(excess, thresholds) -> TailProbability:
    """Empirical ``P(excess > eps)`` and the slope of its logarithm in eps."""
    excess = np.asarray(excess, dtype=float)
    thresholds = np.asarray(thresholds, dtype=float)
    probabilities = np.mean(excess[None, :] > thresholds[:, None], axis=1)

    positive = probabilities > 0.0
    if np.count_nonzero(positive) >= 2:
        fit = stats.linregress(thresholds[positive], np.log(probabilities[positive]))
        slope, intercept, error = fit.slope, fit.intercept, fit.stderr
    else:
        slope = intercept = error = math.nan
    return TailProbability(thresholds, probabilities, slope, intercept, error)


def exponential_fit(costs) -> FitReport:
    """Exponential distribution fitted to nonnegative costs (location 0)."""
    data = np.asarray(costs, dtype=float).reshape(-1)
    if data.shape[0] < 2 or float(np.mean(data)) <= 0.0:
        raise DegenerateFitError("Exponential fit needs positive costs")
    _, scale = stats.expon.fit(data, floc=0.0)
    ks = stats.kstest(data, "expon", args=(0.0, scale))
    return FitReport(
        model="exponential",
        params={"mean": float(scale), "rate": 1.0 / float(scale)},
        errors={"mean": float(scale / math.sqrt(data.shape[0]))},
        statistic={"ks_distance": float(ks.statistic), "ks_pvalue": float(ks.pvalue)},
    )


def histogram(values) -> dict[str, list[float]]:
    """Freedman-Diaconis histogram as a density."""
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins="fd")
    widths = np.diff(edges)
    total = counts.sum()
    density = counts / (total * widths) if total else counts.astype(float)
    return {
        "edges": edges.tolist(),
        "counts": counts.tolist(),
        "density": density.tolist(),
    }
