"""Exception hierarchy shared by all modules."""


class AnnLoewnerError(Exception):
    """Base class for every error raised by :mod:`annloewner`."""


class DomainError(AnnLoewnerError, ValueError):
    """A point lies outside the annulus on which a map or kernel is defined."""


class TruncationError(AnnLoewnerError, ArithmeticError):
    """A series could not be truncated within the requested tolerance."""


class MassConditionError(AnnLoewnerError, ValueError):
    """Circle measures violate the normalisation required by the representation."""


class DegenerateTimeError(AnnLoewnerError, ValueError):
    """A quantity that needs r(t) > 0 was requested where the annulus has degenerated."""


class ConfigError(AnnLoewnerError, ValueError):
    """Malformed driving data, time change or run configuration."""


class SamplingError(AnnLoewnerError, ValueError):
    """A sampled closed curve is too coarse to resolve its winding index."""


class SolverError(AnnLoewnerError, RuntimeError):
    """Integration halted early; ``status`` carries the trajectory status."""

    def __init__(self, message, status=None, trajectory=None):
        super().__init__(message)
        self.status = status
        self.trajectory = trajectory
