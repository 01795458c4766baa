"""Transfer-matrix propagation, Lyapunov exponents and equal-time correlators."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
from scipy.special import logsumexp

from mfaoa.errors import CanonicalFormError, SingularTransferError

from .operator import FluctuationOperator, tau3

logger = logging.getLogger(__name__)

# Largest exponent kept in a plain product before cosh(2 lambda) nears overflow
OVERFLOW_EXPONENT = 300.0 * np.log(10.0) / 2.0
PAIRING_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Transfer matrix at time ``t``.

    In the stabilized regime ``matrix`` holds the orthogonal factor of the
    QR-renormalized product and ``log_scales`` the accumulated logarithms of
    the diagonal of R; the full matrix is never formed.
    """

    t: float
    matrix: np.ndarray
    log_scales: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def stabilized(self) -> bool:
        return self.log_scales is not None

    def flux_error(self) -> float:
        """``max |M^H tau3 M - tau3|``; zero for an exactly flux-conserving M."""
        if self.stabilized:
            raise ValueError("Flux error needs the explicit transfer matrix")
        t3 = tau3(self.n)
        return float(np.max(np.abs(self.matrix.conj().T @ t3 @ self.matrix - t3)))


class Correlator(NamedTuple):
    g: np.ndarray | None
    size: float
    log_size: float


def _generator(op) -> np.ndarray:
    return op.generator if isinstance(op, FluctuationOperator) else np.asarray(op)


def propagate_transfer(
    ops: Sequence[FluctuationOperator | np.ndarray],
    tau: float | Sequence[float],
    t0: float = 0.0,
    dimension: int | None = None,
    warnings: list[str] | None = None,
) -> list[TransferMatrix]:
    """Accumulate ``M_k = exp(-i L_k dt_k) M_{k-1}`` from ``M_0 = 1``.

    Args:
        ops: Operators (or raw generators ``tau3 H``) for slices 1..K
        tau: Uniform step, or one step per slice
        t0: Time of ``M_0``
        dimension: Size 2N of M, needed only when ``ops`` is empty
        warnings: Receives a message when the product switches to QR

    Returns:
        K + 1 transfer matrices, ``M_0`` first. Once the largest exponent
        passes ``300 ln(10) / 2`` the product switches to QR renormalization.
    """
    generators = [_generator(op) for op in ops]
    steps = np.broadcast_to(np.asarray(tau, dtype=float), (len(generators),))

    if generators:
        size = generators[0].shape[0]
    elif dimension is not None:
        size = dimension
    else:
        raise ValueError("An empty operator series needs an explicit dimension")

    identity = np.eye(size, dtype=complex)
    results = [TransferMatrix(t=t0, matrix=identity)]
    current = identity
    log_scales = None
    t = t0

    for generator, dt in zip(generators, steps, strict=True):
        factor = scipy.linalg.expm(-1j * dt * generator)
        t += dt
        if log_scales is None:
            current = factor @ current
            if np.log(np.linalg.norm(current)) > OVERFLOW_EXPONENT:
                message = (
                    f"Transfer matrix exponent exceeds {OVERFLOW_EXPONENT:.1f} "
                    f"at t={t:.4g}; switching to QR-renormalized accumulation"
                )
                logger.warning(message)
                if warnings is not None:
                    warnings.append(message)
                current, r = scipy.linalg.qr(current)
                log_scales = np.log(np.abs(np.diag(r)))
        else:
            current, r = scipy.linalg.qr(factor @ current)
            log_scales = log_scales + np.log(np.abs(np.diag(r)))

        if not np.all(np.isfinite(current)):
            raise SingularTransferError(f"Transfer matrix became non-finite at t={t}")
        results.append(
            TransferMatrix(
                t=t,
                matrix=current,
                log_scales=None if log_scales is None else log_scales.copy(),
            )
        )
    return results


def lyapunov_spectrum(transfer: TransferMatrix | np.ndarray) -> np.ndarray:
    """Nonnegative exponents ``ln`` of the N largest singular values, descending.

    Raises:
        CanonicalFormError: Singular values are not reciprocal pairs
    """
    if isinstance(transfer, TransferMatrix) and transfer.stabilized:
        scales = np.sort(transfer.log_scales)[::-1]
        return np.maximum(scales[: transfer.n], 0.0)

    matrix = transfer.matrix if isinstance(transfer, TransferMatrix) else transfer
    n = matrix.shape[0] // 2
    singular = scipy.linalg.svdvals(matrix)
    products = singular[:n] * singular[::-1][:n]
    # The small partner is only resolved to eps * sigma_max in absolute terms
    tolerance = max(PAIRING_TOLERANCE, 100.0 * np.finfo(float).eps * singular[0] ** 2)
    deviation = np.max(np.abs(products - 1.0)) if n else 0.0
    if deviation > tolerance:
        raise CanonicalFormError(
            f"Singular values are not reciprocal pairs (max deviation {deviation:.3g})"
        )
    return np.maximum(np.log(singular[:n]), 0.0)


def equal_time_correlator(transfers: Sequence[TransferMatrix]) -> list[Correlator]:
    """``g = M tau3 M^-1`` and the fluctuation size ``Tr(M M^H) / 2`` per slice.

    For stabilized slices ``g`` is None and the size comes from the
    exponents as ``sum cosh(2 lambda)``.

    Raises:
        SingularTransferError: A transfer matrix cannot be inverted
    """
    correlators = []
    for transfer in transfers:
        if transfer.stabilized:
            log_size = float(logsumexp(2.0 * transfer.log_scales) - np.log(2.0))
            with np.errstate(over="ignore"):
                size = float(np.exp(log_size))
            correlators.append(Correlator(None, size, log_size))
            continue

        matrix = transfer.matrix
        try:
            inverse = scipy.linalg.inv(matrix)
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise SingularTransferError(
                f"Transfer matrix at t={transfer.t} is singular: {e}"
            ) from e
        if not np.all(np.isfinite(inverse)):
            raise SingularTransferError(
                f"Transfer matrix at t={transfer.t} is singular"
            )

        g = matrix @ tau3(transfer.n) @ inverse
        size = 0.5 * float(np.real(np.trace(matrix @ matrix.conj().T)))
        correlators.append(Correlator(g, size, float(np.log(size))))
    return correlators
