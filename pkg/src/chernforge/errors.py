"""Exception hierarchy shared by all chernforge modules."""


class ChernforgeError(Exception):
    """Base class for library errors."""


class GridMismatch(ChernforgeError, ValueError):
    pass


class DegreeError(ChernforgeError, ValueError):
    pass


class ResolutionError(ChernforgeError, ValueError):
    """The grid cannot resolve the requested harmonics (needs n > 2h)."""


class NotClosed(ChernforgeError, ValueError):
    pass


class HarmonicObstruction(ChernforgeError, ValueError):
    """A form has a nonzero harmonic part and therefore no primitive."""


class NotExact(ChernforgeError, ValueError):
    pass


class QTooSmall(ChernforgeError, ValueError):
    pass


class RegularityNotAchieved(ChernforgeError, RuntimeError):
    pass


class Stalled(ChernforgeError, RuntimeError):
    """The continuation solver stopped making progress.

    ``report`` carries the diagnostic SolveReport, including the regularity
    certificate at the failure point.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BudgetExceeded(ChernforgeError, ValueError):
    pass


class AlgebraCheckFailed(ChernforgeError, ValueError):
    pass
