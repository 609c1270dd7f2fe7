"""Exception types shared by all modules.

The CLI maps each family onto an exit code, so new errors should subclass
one of the three families below rather than ``QxformError`` directly.
"""


class QxformError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QxformError, ValueError):
    """Bad input: parameters, dimensions, layouts (CLI exit code 3)."""


class InvalidDimensionError(ValidationError):
    pass


class ParameterError(ValidationError):
    pass


class LayoutError(ValidationError):
    pass


class UnsupportedCaseError(ValidationError):
    pass


class NumericalError(QxformError, ArithmeticError):
    """The computation itself went wrong (CLI exit code 4)."""


class NonFiniteError(NumericalError):
    pass


class SingularityError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class PositivityAlarm(NumericalError):
    pass
