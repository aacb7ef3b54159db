"""Exception hierarchy shared by all plisskit modules."""


class PlisskitError(Exception):
    """Base class for every error raised by plisskit."""


class MapError(PlisskitError):
    """A map descriptor cannot be evaluated."""


class NonInvertibleParameters(MapError):
    pass


class DegenerateSplitting(PlisskitError):
    """No hyperbolic splitting is visible over the requested window."""


class EmptySequence(PlisskitError, ValueError):
    pass


class BadOrdering(PlisskitError, ValueError):
    """Pliss thresholds are not strictly increasing."""


class SchedulerError(PlisskitError):
    """The constant schedule cannot be built for the given input."""


class TTooSmall(SchedulerError):
    pass


class TOutOfRange(SchedulerError):
    pass


class SOutOfRange(SchedulerError):
    pass


class SideConditionViolated(SchedulerError):
    pass


class NotConverged(PlisskitError):
    """A Lyapunov estimate is too noisy to decide the exponent hypothesis."""


class PreconditionNotMet(PlisskitError):
    pass


class OrbitTooShort(PlisskitError, ValueError):
    pass


class ReportIOError(PlisskitError, OSError):
    """Reading or writing a report failed; the message names the path."""
