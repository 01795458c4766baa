"""Gaussian fluctuation (paramagnon) operator around a mean-field configuration.

Spins are parametrized by stereographic coordinates
``z_i = (n^x_i + i s_i n^y_i) / (1 + s_i n^z_i)`` projected from the pole
``(0, 0, -s_i)`` opposite to the rounded solution ``s_i``. The operator is
the Hessian of the coherent-state energy in these coordinates:

    A_ii = 2 (1 - s) Delta_i n^x_i / (1 + s_i n^z_i) + 2 s s_i m_i
    A_ij = -s J_ij n^+_i n^-_j
    B_ij = -s J_ij n^+_i n^+_j,    B_ii = 0

with ``n^+- = s_i n^x +- i n^y``.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from mfaoa.dynamics import SpinConfiguration, magnetization
from mfaoa.errors import DimensionError, PoleSingularityError
from mfaoa.problems import IsingProblem, as_bitstring

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-6
INSTABILITY_TOLERANCE = 1e-8


def tau3(n: int) -> np.ndarray:
    """Block sign matrix ``diag(1, ..., 1, -1, ..., -1)`` of size 2N."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


@dataclass(frozen=True, eq=False)
class FluctuationOperator:
    A: np.ndarray
    B: np.ndarray
    s: float

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def hamiltonian(self) -> np.ndarray:
        """Bogoliubov block matrix ``[[A, B], [B^H, conj(A)]]``."""
        return np.block([[self.A, self.B], [self.B.conj().T, self.A.conj()]])

    @property
    def generator(self) -> np.ndarray:
        """``tau3 @ hamiltonian``, the generator of the transfer matrix."""
        return np.block([[self.A, self.B], [-self.B.conj().T, -self.A.conj()]])


class MagnonSpectrum(NamedTuple):
    omegas: np.ndarray
    stable: bool


def build_fluctuation_operator(
    problem: IsingProblem,
    config: SpinConfiguration,
    sigma_star,
    s: float,
) -> FluctuationOperator:
    """Fluctuation matrices A and B at protocol fraction ``s``.

    Raises:
        PoleSingularityError: Some spin is within 1e-6 of its projection pole
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"Protocol fraction s must lie in [0, 1], got {s}")
    if config.n != problem.n:
        raise DimensionError(
            f"Configuration has {config.n} spins, problem has {problem.n}"
        )
    sigma = as_bitstring(sigma_star, problem.n).astype(float)

    denominator = 1.0 + sigma * config.z
    at_pole = np.flatnonzero(denominator < POLE_TOLERANCE)
    if at_pole.size:
        raise PoleSingularityError(
            f"Spins {at_pole.tolist()} sit at the projection pole at s={s:.6g}",
            spins=at_pole.tolist(),
        )

    m = magnetization(problem, config)
    n_plus = sigma * config.x + 1j * config.y
    n_minus = sigma * config.x - 1j * config.y

    a = -s * problem.couplings * np.outer(n_plus, n_minus)
    np.fill_diagonal(
        a,
        2.0 * (1.0 - s) * problem.driver * config.x / denominator
        + 2.0 * s * sigma * m,
    )
    b = -s * problem.couplings * np.outer(n_plus, n_plus)
    np.fill_diagonal(b, 0.0)
    return FluctuationOperator(A=a, B=b, s=float(s))


def magnon_spectrum(op: FluctuationOperator) -> MagnonSpectrum:
    """Positive paramagnon frequencies, ascending, and a stability flag.

    Eigenvalues of ``tau3 H`` come in +-omega pairs; the N with the largest
    real part are returned. Complex frequencies mark a dynamically unstable
    slice and are reported through ``stable=False`` with a warning.
    """
    eigenvalues = scipy.linalg.eigvals(op.generator)
    stable = bool(np.max(np.abs(eigenvalues.imag)) <= INSTABILITY_TOLERANCE)
    if not stable:
        logger.warning(
            "Complex magnon frequencies at s=%.4f (max imaginary part %.3g)",
            op.s,
            np.max(np.abs(eigenvalues.imag)),
        )
    real_parts = np.sort(eigenvalues.real)
    return MagnonSpectrum(omegas=real_parts[op.n :], stable=stable)


def spins_to_coherent(config: SpinConfiguration, sigma_star) -> np.ndarray:
    """Stereographic coordinates z_i of a configuration."""
    sigma = as_bitstring(sigma_star, config.n).astype(float)
    return (config.x + 1j * sigma * config.y) / (1.0 + sigma * config.z)


def coherent_to_spins(z: np.ndarray, sigma_star) -> SpinConfiguration:
    """Inverse of :func:`spins_to_coherent`."""
    z = np.asarray(z, dtype=complex)
    sigma = as_bitstring(sigma_star, z.shape[0]).astype(float)
    w = np.abs(z) ** 2
    planar = 2.0 * z / (1.0 + w)
    spins = np.column_stack(
        (planar.real, sigma * planar.imag, sigma * (1.0 - w) / (1.0 + w))
    )
    return SpinConfiguration(spins)


def coherent_state_energy(problem: IsingProblem, z, sigma_star, s: float) -> float:
    """Classical energy ``(1 - s) H_D + s H_P`` of the product state at ``z``."""
    config = coherent_to_spins(z, sigma_star)
    nz = config.z
    problem_energy = -(problem.fields @ nz) - 0.5 * nz @ problem.couplings @ nz
    driver_energy = -(problem.driver @ config.x)
    return float(s * problem_energy + (1.0 - s) * driver_energy)
