"""Exception hierarchy shared by all modules."""


class HardyAdmitError(Exception):
    """Base class; the CLI maps subclasses onto exit codes."""

    exit_code = 3


class ValidationError(HardyAdmitError, ValueError):
    exit_code = 2


class ExponentRangeError(ValidationError):
    pass


class InvalidDomainError(ValidationError):
    pass


class InvalidWeightError(ValidationError):
    pass


class InvalidTableError(ValidationError):
    pass


class UnsupportedCaseError(ValidationError):
    pass


class NumericFailure(HardyAdmitError):
    exit_code = 3


class DivergentMaximalFunction(NumericFailure):
    pass


class DegenerateRearrangement(NumericFailure):
    pass


class ConvergenceFailure(NumericFailure):
    pass
