"""Exception types shared across the library."""


class ElascatError(Exception):
    """Base class for all library-specific errors."""


class ConfigError(ElascatError):
    """Invalid or inconsistent experiment configuration."""


class SingularPoint(ElascatError):
    """Kernel or transform evaluated at its singular point."""


class SingularContrast(ElascatError):
    """A material contrast difference vanishes, so its inverse does not exist."""


class NotInvertible(ElascatError):
    """Requested inverse of a degenerate (rank-deficient) tensor."""


class ZeroTensorContrast(ElascatError):
    """Contrast hits the exceptional pair where the constant tensor vanishes."""


class DegenerateModuli(ElascatError):
    """Moduli combination outside the admissible range of the decomposition."""


class AsymmetricInput(ElascatError):
    """Tensor argument violates the required index symmetries."""


class NoConvergence(ElascatError):
    """Iterative solver exhausted its iteration budget."""


class SingularSystem(ElascatError):
    """Dense collocation system is numerically singular."""


class Diverged(ElascatError):
    """Newton iteration residual grew for several consecutive steps."""

    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records if records is not None else []
