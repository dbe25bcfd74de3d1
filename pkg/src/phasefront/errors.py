"""Exception types shared across the package."""


class PhasefrontError(Exception):
    """Base class for all package-specific errors."""


class InvalidInput(PhasefrontError):
    """An argument violates a documented precondition."""


class IntegrationFailure(PhasefrontError):
    """Adaptive time integration could not continue (step underflow or blow-up).

    ``last_valid_time`` is the largest time for which a valid state exists.
    """

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class NoFrontCrossing(PhasefrontError):
    """A profile has no sign change, so no front position is defined."""


class FitDiverged(PhasefrontError):
    """Nonlinear fit did not converge; carries the best parameters seen."""

    def __init__(self, message, params=None, residual=None):
        super().__init__(message)
        self.params = params
        self.residual = residual


class ExtractionFailure(PhasefrontError):
    """Front extraction failed for one column of a 2D field."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class FrontTooCloseToBoundary(PhasefrontError):
    """A front profile runs too close to a zero-flux wall to lift safely."""


class FormatError(PhasefrontError):
    """A binary file does not match its documented layout."""


class TrainingDiverged(PhasefrontError):
    """Training produced a non-finite loss; carries the epoch index."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class EvaluationError(PhasefrontError):
    """A learned right-hand side produced a non-finite value."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
