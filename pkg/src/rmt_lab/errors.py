"""Exception hierarchy for rmt_lab."""


class RmtLabError(Exception):
    pass


class InvalidParameterError(RmtLabError, ValueError):
    pass


class InvalidDimensionError(RmtLabError, ValueError):
    pass


class InvalidBandError(RmtLabError, ValueError):
    pass


class DegenerateProfileError(RmtLabError, ValueError):
    pass


class NonNormalizableError(RmtLabError, ValueError):
    pass


class ConvergenceError(RmtLabError, RuntimeError):
    pass


class NumericallySingularError(RmtLabError, ArithmeticError):
    pass


class PivotDegeneracyError(RmtLabError, ArithmeticError):
    pass


class WeightConditionError(RmtLabError, ValueError):
    pass


class EmptyDomainError(RmtLabError, ValueError):
    pass


class ConfigError(RmtLabError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
