"""Exception and warning types raised across the package."""


class RangeError(ValueError):
    """A parameter is outside its allowed range."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"{field} out of range")


class StabilityError(ValueError):
    """Cavity pump exceeds cavity loss, so regression correlators grow in time."""


class SingularSystemError(ArithmeticError):
    pass


class DegenerateSpectrumError(ArithmeticError):
    pass


class NonDecayingError(ArithmeticError):
    pass


class ZeroPopulationError(ArithmeticError):
    pass


class TripletNotFoundError(ValueError):
    pass


class NonPositiveDissipatorError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class DegenerateSteadyStateError(ArithmeticError):
    pass


class StepFailureError(RuntimeError):
    pass


class UndefinedAngleError(ValueError):
    pass


class DivisionError(ZeroDivisionError):
    pass


class ConvergenceWarning(UserWarning):
    pass


class GridWarning(UserWarning):
    """Spectrum has not decayed at the edges of its frequency or delay grid."""
