"""Exception hierarchy shared by all curvlab modules."""


class CurvlabError(Exception):
    """Base class for every error raised by curvlab."""


class DegenerateMetricError(CurvlabError):
    """The metric is singular or not positive definite at the evaluation point."""


class AxiomViolationError(CurvlabError):
    """The almost Hermitian axioms fail beyond tolerance.

    ``residual`` is the offending residual and ``point`` the chart point
    where it was observed (``None`` for purely algebraic input).
    """

    def __init__(self, message, residual=None, point=None):
        super().__init__(message)
        self.residual = residual
        self.point = point


class FieldDomainError(CurvlabError):
    """A field expression was evaluated outside its domain (``1/0``, ``log(-1)``...)."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ExpressionSyntaxError(CurvlabError):
    """Malformed field expression; carries 1-based ``line`` and ``column``."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class ArityError(ExpressionSyntaxError):
    pass


class ModelFormatError(CurvlabError):
    """A user model file could not be parsed."""


class PreconditionError(CurvlabError):
    """An operation was called outside its stated hypotheses."""


class ConstraintViolationError(CurvlabError):
    """Computed curvature entries violate structural identities (upstream conventions bug)."""
