"""Lyapunov traces along a mean-field trajectory and the hardness report."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from mfaoa.config import resolve_threads
from mfaoa.dynamics import Trajectory
from mfaoa.errors import InvalidParameterError, PoleSingularityError
from mfaoa.problems import IsingProblem, as_bitstring

from .operator import FluctuationOperator, build_fluctuation_operator, magnon_spectrum
from .transfer import TransferMatrix, lyapunov_spectrum, propagate_transfer

logger = logging.getLogger(__name__)

MAX_SLICES = 2000
REFLECTIONLESS_TOLERANCE = 1e-3
OSCILLATION_WINDOW = 0.2
OSCILLATION_SIGN_CHANGES = 3
SLOPE_FLOOR = 1e-6
EASY_RATIO = 2.0 / 3.0


@dataclass(eq=False)
class LyapunovTrace:
    """Exponents and magnon frequencies on the kept slices of a trajectory.

    Attributes:
        times: Protocol fraction s = k / p of each kept slice
        lambdas: K x N exponents, each row sorted descending
        omegas: K x N magnon frequencies, each row ascending
        stable: Per-slice flag, False where frequencies turned complex
        gaps: Protocol fractions of slices skipped at a projection pole
    """

    times: np.ndarray
    lambdas: np.ndarray
    omegas: np.ndarray
    stable: np.ndarray
    gaps: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    transfers: list[TransferMatrix] | None = None

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def n(self) -> int:
        return self.lambdas.shape[1]

    def rows(self) -> list[list[float]]:
        """CSV rows ``s, omega_0..omega_{N-1}, lambda_0..lambda_{N-1}``."""
        return [
            [float(s), *map(float, omegas), *map(float, lambdas)]
            for s, omegas, lambdas in zip(
                self.times, self.omegas, self.lambdas, strict=True
            )
        ]

    def header(self) -> list[str]:
        return [
            "s",
            *(f"omega_{i}" for i in range(self.n)),
            *(f"lambda_{i}" for i in range(self.n)),
        ]


@dataclass(frozen=True)
class HardnessReport:
    n: int
    max_lambda: float
    s_at_max: float
    threshold: float
    ratio: float
    reflectionless: bool
    final_lambda: float
    oscillations: bool
    sign_changes: int
    classification: str
    easy_ratio: float = EASY_RATIO

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_lambda": self.max_lambda,
            "s_at_max": self.s_at_max,
            "threshold": self.threshold,
            "ratio": self.ratio,
            "reflectionless": self.reflectionless,
            "final_lambda": self.final_lambda,
            "oscillations": self.oscillations,
            "sign_changes": self.sign_changes,
            "classification": self.classification,
            "easy_ratio": self.easy_ratio,
        }


def slice_stride(p: int, max_slices: int = MAX_SLICES) -> int:
    """Steps between fluctuation slices so that at most ``max_slices`` are used."""
    if max_slices < 1:
        raise InvalidParameterError(f"max_slices must be >= 1, got {max_slices}")
    return max(1, math.ceil(p / max_slices))


def _slice_indices(trajectory: Trajectory, max_slices: int) -> list[int]:
    target = slice_stride(trajectory.p, max_slices)
    factor = max(1, math.ceil(target / trajectory.stride))
    indices = list(range(0, len(trajectory), factor))
    if indices[-1] != len(trajectory) - 1:
        indices.append(len(trajectory) - 1)
    return indices


def fluctuation_trace(
    problem: IsingProblem,
    trajectory: Trajectory,
    sigma_star,
    max_slices: int = MAX_SLICES,
    threads: int | None = None,
    keep_transfers: bool = False,
) -> LyapunovTrace:
    """Build operators on every kept slice and propagate the transfer matrix.

    A slice where some spin sits at its projection pole is skipped: it is
    left out of the trace, its s is listed in ``gaps``, and the previous valid
    generator covers its interval.
    """
    sigma = as_bitstring(sigma_star, problem.n)
    indices = _slice_indices(trajectory, max_slices)
    steps = trajectory.steps[indices]
    fractions = steps / trajectory.p

    operators: list[FluctuationOperator | None] = []
    gaps: list[float] = []
    warnings: list[str] = []
    for index, s in zip(indices, fractions, strict=True):
        try:
            operators.append(
                build_fluctuation_operator(
                    problem, trajectory.configuration(index), sigma, float(s)
                )
            )
        except PoleSingularityError as e:
            operators.append(None)
            gaps.append(float(s))
            message = f"Skipped fluctuation slice at s={s:.6g}: {e}"
            logger.warning(message)
            warnings.append(message)

    if operators[0] is None:
        raise PoleSingularityError("The first fluctuation slice is at a pole")

    generators = []
    last_valid = operators[0]
    for op in operators[1:]:
        last_valid = op if op is not None else last_valid
        generators.append(last_valid)

    transfers = propagate_transfer(
        generators,
        np.diff(steps) * trajectory.tau,
        t0=float(steps[0] * trajectory.tau),
        dimension=2 * problem.n,
        warnings=warnings,
    )

    kept = [j for j, op in enumerate(operators) if op is not None]
    valid_ops = [operators[j] for j in kept]
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as executor:
        spectra = list(executor.map(magnon_spectrum, valid_ops))

    unstable = [
        op.s for op, sp in zip(valid_ops, spectra, strict=True) if not sp.stable
    ]
    if unstable:
        message = (
            f"Magnon spectrum unstable on {len(unstable)} slices "
            f"(first at s={unstable[0]:.4f})"
        )
        warnings.append(message)

    return LyapunovTrace(
        times=fractions[kept],
        lambdas=np.stack([lyapunov_spectrum(transfers[j]) for j in kept]),
        omegas=np.stack([sp.omegas for sp in spectra]),
        stable=np.array([sp.stable for sp in spectra]),
        gaps=gaps,
        warnings=warnings,
        transfers=[transfers[j] for j in kept] if keep_transfers else None,
    )


def count_sign_changes(values: np.ndarray, floor: float = SLOPE_FLOOR) -> int:
    """Sign changes of the discrete slope, ignoring steps below ``floor``."""
    slopes = np.diff(values)
    signs = np.sign(slopes[np.abs(slopes) >= floor])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def hardness_report(
    trace: LyapunovTrace, n: int, easy_ratio: float = EASY_RATIO
) -> HardnessReport:
    """Compare the largest exponent with the ``ln sqrt(n)`` threshold.

    The instance is classified "easy" when ``max lambda_0 / ln sqrt(n)`` is
    below ``easy_ratio``. Late-time oscillations are flagged when the slope
    of lambda_0 changes sign at least three times in the last 20% of the
    protocol.
    """
    if len(trace) == 0:
        raise ValueError("hardness_report needs a nonempty trace")

    leading = trace.lambdas[:, 0]
    peak = int(np.argmax(leading))
    max_lambda = float(leading[peak])
    threshold = 0.5 * math.log(n) if n > 0 else 0.0
    if threshold > 0.0:
        ratio = max_lambda / threshold
    else:
        ratio = 0.0 if max_lambda == 0.0 else math.inf

    late = trace.times >= 1.0 - OSCILLATION_WINDOW
    sign_changes = count_sign_changes(leading[late])
    final_lambda = float(np.max(trace.lambdas[-1]))

    return HardnessReport(
        n=n,
        max_lambda=max_lambda,
        s_at_max=float(trace.times[peak]),
        threshold=threshold,
        ratio=ratio,
        reflectionless=final_lambda < REFLECTIONLESS_TOLERANCE,
        final_lambda=final_lambda,
        oscillations=sign_changes >= OSCILLATION_SIGN_CHANGES,
        sign_changes=sign_changes,
        classification="easy" if ratio < easy_ratio else "hard",
        easy_ratio=easy_ratio,
    )


def exponent_peaks(trace: LyapunovTrace, prominence: float = 0.05) -> np.ndarray:
    """Protocol fractions where the leading exponent has a local peak."""
    peaks, _ = find_peaks(trace.lambdas[:, 0], prominence=prominence)
    return trace.times[peaks]
