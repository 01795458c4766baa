"""Exception hierarchy for mfaoa.

Every domain failure raised by the library derives from :class:`MFAOAError`,
which is what the command line maps to exit code 1.
"""


class MFAOAError(Exception):
    """Base class for all domain errors."""


class InvalidInstanceError(MFAOAError, ValueError):
    """Instance parameters violate the Ising problem contract."""


class DimensionError(MFAOAError, ValueError):
    """Array lengths or shapes do not match the problem size."""


class SymmetryAlreadyBrokenError(MFAOAError, ValueError):
    """break_symmetry was called on a problem with nonzero fields."""


class SymmetricInputError(MFAOAError, ValueError):
    """Mean-field evolution was requested on a Z2-symmetric problem.

    With all fields zero the spins never leave the initial state.
    """


class InvalidScheduleError(MFAOAError, ValueError):
    """Schedule parameters are out of range."""


class InvalidParameterError(MFAOAError, ValueError):
    """A count, stride or level number is out of range."""


class NumericContaminationError(MFAOAError, ArithmeticError):
    """NaN or infinite values entered the spin state."""


class PoleSingularityError(MFAOAError, ArithmeticError):
    """A spin sits at the projection pole of the fluctuation coordinates."""

    def __init__(self, message: str, spins: list[int] | None = None):
        super().__init__(message)
        self.spins = spins or []


class CanonicalFormError(MFAOAError, ArithmeticError):
    """Singular values of a transfer matrix are not reciprocal pairs."""


class SingularTransferError(MFAOAError, ArithmeticError):
    """A transfer matrix could not be inverted."""


class BudgetExceededError(MFAOAError, ValueError):
    """An exact oracle was asked for more spins than it can enumerate."""


class OracleRequiredError(MFAOAError, ValueError):
    """An ensemble statistic needs exact ground energies that are missing."""


class DegenerateFitError(MFAOAError, ValueError):
    """The data cannot determine the model parameters."""
