"""Exception hierarchy shared by all modules."""


class SignedDynamicsError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(SignedDynamicsError, ValueError):
    pass


class InvalidMatrix(SignedDynamicsError, ValueError):
    """Raised when a matrix fails validation; carries the report."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"invalid signed matrix: {report.summary()}")


class InvalidInput(SignedDynamicsError, ValueError):
    """An operation's precondition on its input does not hold."""


class CapExceeded(SignedDynamicsError):
    """An enumeration would exceed a hard size cap."""


class NotApplicable(SignedDynamicsError):
    """A predictor was called outside the hypotheses it relies on."""


class NumericalFailure(SignedDynamicsError):
    pass


class IntegratorInstability(SignedDynamicsError):
    """A runtime monitor detected a violated bound; try a smaller step."""


class DivergenceError(SignedDynamicsError):
    pass


class GainEvaluationError(SignedDynamicsError):
    pass


class TrajectoryTooShort(SignedDynamicsError, ValueError):
    pass


class ScenarioError(SignedDynamicsError, ValueError):
    """Scenario file is unreadable or does not match the schema."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        self.diagnostics = diagnostics or []
        super().__init__(message)
