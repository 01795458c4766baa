"""Mean-field evolution of classical Bloch vectors.

Each step applies two exact rotations per spin: first about z by
``2 m_i gamma_k`` with the magnetization ``m = h + J n^z`` of the incoming
configuration, then about x by ``2 Delta_i beta_k``. The z-rotation leaves
every n^z unchanged and the x-rotation every n^x, so both sub-steps are
closed form and norm preserving.
"""

import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from mfaoa.errors import (
    DimensionError,
    InvalidParameterError,
    NumericContaminationError,
    SymmetricInputError,
)
from mfaoa.problems import IsingProblem

from .schedule import Schedule

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class SpinConfiguration:
    """N unit Bloch vectors stored as an N x 3 array of (x, y, z) rows."""

    spins: np.ndarray

    def __post_init__(self):
        spins = np.asarray(self.spins, dtype=float)
        if spins.ndim != 2 or spins.shape[1] != 3:
            raise DimensionError(f"Spin array must be N x 3, got {spins.shape}")
        object.__setattr__(self, "spins", spins)

    @classmethod
    def initial(cls, n: int) -> "SpinConfiguration":
        """All spins along +x, the ground state of the driver."""
        spins = np.zeros((n, 3))
        spins[:, 0] = 1.0
        return cls(spins)

    @property
    def n(self) -> int:
        return self.spins.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.spins[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.spins[:, 1]

    @property
    def z(self) -> np.ndarray:
        return self.spins[:, 2]

    def norm_error(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.spins, axis=1) - 1.0)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Strided record of configurations at steps ``k`` and times ``t = k tau``."""

    steps: np.ndarray
    times: np.ndarray
    spins: np.ndarray
    magnetizations: np.ndarray
    tau: float
    p: int
    stride: int = 1

    @classmethod
    def from_spins(
        cls,
        problem: IsingProblem,
        steps: np.ndarray,
        spins: np.ndarray,
        tau: float,
        p: int,
        stride: int = 1,
    ) -> "Trajectory":
        spins = np.asarray(spins, dtype=float)
        magnetizations = problem.fields + spins[:, :, 2] @ problem.couplings
        steps = np.asarray(steps, dtype=int)
        return cls(
            steps=steps,
            times=steps * tau,
            spins=spins,
            magnetizations=magnetizations,
            tau=tau,
            p=p,
            stride=stride,
        )

    @property
    def n(self) -> int:
        return self.spins.shape[1]

    @property
    def s(self) -> np.ndarray:
        """Protocol fraction ``k / p`` of each recorded slice."""
        return self.steps / self.p

    def __len__(self) -> int:
        return self.steps.shape[0]

    def configuration(self, index: int) -> SpinConfiguration:
        return SpinConfiguration(self.spins[index])


def magnetization(problem: IsingProblem, config: SpinConfiguration) -> np.ndarray:
    """Effective fields ``m_i = h_i + sum_j J_ij n_j^z``."""
    if config.n != problem.n:
        raise DimensionError(
            f"Configuration has {config.n} spins, problem has {problem.n}"
        )
    return problem.fields + problem.couplings @ config.z


def problem_rotation(angle: float) -> np.ndarray:
    """3 x 3 matrix of the z-rotation applied by the problem sub-step."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def driver_rotation(angle: float) -> np.ndarray:
    """3 x 3 matrix of the x-rotation applied by the driver sub-step."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])


def problem_substep(
    problem: IsingProblem, spins: np.ndarray, gamma: float
) -> np.ndarray:
    m = problem.fields + problem.couplings @ spins[:, 2]
    angle = 2.0 * m * gamma
    c, s = np.cos(angle), np.sin(angle)
    x, y = spins[:, 0], spins[:, 1]
    return np.column_stack((c * x + s * y, -s * x + c * y, spins[:, 2]))


def driver_substep(problem: IsingProblem, spins: np.ndarray, beta: float) -> np.ndarray:
    angle = 2.0 * problem.driver * beta
    c, s = np.cos(angle), np.sin(angle)
    y, z = spins[:, 1], spins[:, 2]
    return np.column_stack((spins[:, 0], c * y + s * z, -s * y + c * z))


def step(
    problem: IsingProblem, config: SpinConfiguration, gamma_k: float, beta_k: float
) -> SpinConfiguration:
    """One layer: problem rotation, then driver rotation.

    Raises:
        DimensionError: Configuration size does not match the problem
        NumericContaminationError: Non-finite entries in the input
    """
    if config.n != problem.n:
        raise DimensionError(
            f"Configuration has {config.n} spins, problem has {problem.n}"
        )
    if not np.all(np.isfinite(config.spins)):
        raise NumericContaminationError("Spin configuration contains NaN or Inf")
    spins = problem_substep(problem, config.spins, gamma_k)
    spins = driver_substep(problem, spins, beta_k)
    return SpinConfiguration(spins)


def iterate(problem: IsingProblem, schedule: Schedule) -> Iterator[np.ndarray]:
    """Yield the N x 3 spin array at k = 0, 1, ..., p.

    Raises:
        SymmetricInputError: All local fields are zero
    """
    if problem.is_symmetric:
        raise SymmetricInputError(
            "All local fields are zero: the spins would stay in the initial "
            "state. Break the Z2 symmetry first."
        )
    spins = SpinConfiguration.initial(problem.n).spins
    yield spins
    for gamma, beta in zip(schedule.gammas, schedule.betas, strict=True):
        spins = problem_substep(problem, spins, gamma)
        spins = driver_substep(problem, spins, beta)
        yield spins
    if not np.all(np.isfinite(spins)):
        raise NumericContaminationError("Evolution produced NaN or Inf spins")


def evolve(
    problem: IsingProblem,
    schedule: Schedule,
    record: bool = False,
    stride: int = 1,
) -> tuple[SpinConfiguration, Trajectory | None]:
    """Run the full schedule from all spins along +x.

    Args:
        problem: Problem with at least one nonzero local field
        schedule: Angles for the p layers
        record: Keep a trajectory of every ``stride``-th slice (the final
            slice is always kept)
        stride: Recording stride

    Returns:
        Final configuration and the trajectory (None unless ``record``)
    """
    if stride < 1:
        raise InvalidParameterError(f"Recording stride must be >= 1, got {stride}")

    steps: list[int] = []
    snapshots: list[np.ndarray] = []
    spins = None
    for k, spins in enumerate(iterate(problem, schedule)):
        if record and (k % stride == 0 or k == schedule.p):
            steps.append(k)
            snapshots.append(spins)

    final = SpinConfiguration(spins)
    if not record:
        return final, None

    trajectory = Trajectory.from_spins(
        problem,
        steps=np.asarray(steps),
        spins=np.stack(snapshots),
        tau=schedule.tau,
        p=schedule.p,
        stride=stride,
    )
    return final, trajectory


def round_solution(config: SpinConfiguration) -> np.ndarray:
    """Sign of each n^z as a bitstring, with 0 mapped to +1."""
    return np.where(config.z >= 0.0, 1, -1).astype(np.int8)


def step_angles(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Angle between matching Bloch vectors of two N x 3 arrays."""
    cross = np.linalg.norm(np.cross(first, second), axis=-1)
    dot = np.sum(first * second, axis=-1)
    return np.arctan2(cross, dot)
