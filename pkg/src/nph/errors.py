"""Exception hierarchy shared across the package."""


class NphError(Exception):
    """Base class for all domain errors raised by this package."""


class DatasetError(NphError):
    """A dataset violates the two-arm survival data contract."""


class EmptyArmError(DatasetError):
    """One arm has zero subjects; two-sample statistics are undefined."""


class NoEventsError(DatasetError):
    """Every subject is censored; there is nothing to test."""


class NegativeTimeError(DatasetError):
    """A follow-up time is negative."""


class DatasetFormatError(DatasetError):
    """A dataset file could not be parsed; the message names the row."""


class DomainError(NphError):
    """An argument lies outside the mathematical domain of the operation."""


class DegenerateVarianceError(NphError):
    """The test variance is zero, e.g. no event time has both arms at risk."""


class AllZeroWeightsError(NphError):
    """Every event-time weight is zero, so no adjustment factor exists."""


class NonConvergenceError(NphError):
    """Newton-Raphson failed to converge (e.g. monotone partial likelihood).

    Carries the last iterate so callers can inspect how the fit diverged.
    """

    def __init__(self, message, beta_last=None, score_last=None, iterations=None):
        super().__init__(message)
        self.beta_last = beta_last
        self.score_last = score_last
        self.iterations = iterations


class OutOfRangeError(NphError):
    """A target value lies outside the invertible range of a function."""


class NumericalError(NphError):
    """A numerical routine failed; the message reports the failing state."""


class PrecisionLossWarning(UserWarning):
    """Emitted where a quantity is evaluated in a numerically hostile regime."""
