"""Exception hierarchy.

Every error carries a ``code`` used by the CLI to pick an exit status and a
module-qualified tag for messages.
"""


class QedError(Exception):
    code = 1
    module = "qednonlin"


class InvalidParameterError(QedError, ValueError):
    code = 2
    module = "core"


class ConfigError(QedError, ValueError):
    code = 2
    module = "config"


class DimensionError(QedError, ValueError):
    code = 3
    module = "core"


class NumericError(QedError, ArithmeticError):
    code = 3
    module = "numeric"


class SearchFailure(NumericError):
    module = "spectrum"


class StiffnessError(NumericError):
    module = "dynamics"


class NonUniqueSteadyState(NumericError):
    module = "dynamics"


class UndefinedValueError(NumericError):
    """Raised for quantities with no defined value (e.g. Mandel Q of vacuum)."""

    module = "dynamics"


class InstabilityError(NumericError):
    """Parametric instability: the reduced field model has no steady state."""

    module = "squeezing"
