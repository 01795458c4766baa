"""Annealing schedules for the alternating problem/driver sequence."""

from dataclasses import dataclass

import numpy as np

from mfaoa.errors import InvalidScheduleError


@dataclass(frozen=True, eq=False)
class Schedule:
    """Per-step angles ``gammas[k-1]``, ``betas[k-1]`` for k = 1..p.

    ``tau`` is the step size of the ramp the angles were derived from; for
    arbitrary angle arrays it only sets the time axis of recorded slices.
    """

    p: int
    tau: float
    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        gammas = np.asarray(self.gammas, dtype=float).reshape(-1).copy()
        betas = np.asarray(self.betas, dtype=float).reshape(-1).copy()
        if self.p < 1:
            raise InvalidScheduleError(f"Schedule needs p >= 1, got {self.p}")
        if not self.tau > 0:
            raise InvalidScheduleError(f"Schedule needs tau > 0, got {self.tau}")
        if gammas.shape != (self.p,) or betas.shape != (self.p,):
            raise InvalidScheduleError(
                f"Angle arrays must have length p={self.p}, "
                f"got {gammas.shape[0]} and {betas.shape[0]}"
            )
        if not (np.all(np.isfinite(gammas)) and np.all(np.isfinite(betas))):
            raise InvalidScheduleError("Schedule angles must be finite")
        gammas.setflags(write=False)
        betas.setflags(write=False)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def total_time(self) -> float:
        return self.p * self.tau

    def to_dict(self) -> dict:
        return {"p": self.p, "tau": self.tau}


def linear_schedule(p: int, tau: float) -> Schedule:
    """Linear ramp ``gamma_k = tau k / p``, ``beta_k = tau (1 - (k - 1) / p)``.

    Raises:
        InvalidScheduleError: p < 1 or tau <= 0
    """
    if int(p) != p or p < 1:
        raise InvalidScheduleError(f"Schedule needs an integer p >= 1, got {p}")
    if not tau > 0:
        raise InvalidScheduleError(f"Schedule needs tau > 0, got {tau}")
    p = int(p)
    k = np.arange(1, p + 1, dtype=float)
    return Schedule(p=p, tau=tau, gammas=tau * k / p, betas=tau * (1.0 - (k - 1) / p))
