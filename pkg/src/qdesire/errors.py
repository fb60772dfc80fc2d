"""Exception hierarchy shared by all modules."""


class QDesireError(Exception):
    """Base class for every error raised by the package."""


class NotSquare(QDesireError, ValueError):
    pass


class NonFinite(QDesireError, ValueError):
    pass


class NotHermitian(QDesireError, ValueError):
    pass


class DimensionMismatch(QDesireError, ValueError):
    pass


class NoConvergence(QDesireError, RuntimeError):
    pass


class NotProjector(QDesireError, ValueError):
    pass


class NotOrthogonal(QDesireError, ValueError):
    pass


class NotComplete(QDesireError, ValueError):
    pass


class RankNotOne(QDesireError, ValueError):
    pass


class NotDensityMatrix(QDesireError, ValueError):
    pass


class InvalidDistribution(QDesireError, ValueError):
    pass


class SolverFailure(QDesireError, RuntimeError):
    """The conic solver stopped without reaching the requested accuracy."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class MaxIterations(SolverFailure):
    pass


class BracketFailure(QDesireError, RuntimeError):
    pass


class DimensionTooLarge(QDesireError, ValueError):
    pass


class Incoherent(QDesireError, ValueError):
    """Assessments incur a partial loss; ``report`` carries the certificate."""

    def __init__(self, report):
        super().__init__(f"assessments incur partial loss (margin {report.margin:.3g})")
        self.report = report


class EmptyCredalSet(QDesireError, ValueError):
    pass


class UndefinedConditioning(QDesireError, ValueError):
    """The conditioning event has zero lower but positive upper probability."""

    def __init__(self, lower, upper):
        super().__init__(
            f"event probability ranges over [{lower:.3g}, {upper:.3g}]; "
            "conditioning is only defined when it is positive for every state")
        self.lower = lower
        self.upper = upper


class NotMaximal(QDesireError, ValueError):
    pass


class NotIncoherent(QDesireError, ValueError):
    pass


class ParseError(QDesireError, ValueError):
    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class ValidationError(QDesireError, ValueError):
    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
