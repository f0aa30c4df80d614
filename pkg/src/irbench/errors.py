"""Exception types shared across the package.

Every error carries an ``exit_code`` used by the command line layer:
2 for problems with user-supplied input, 3 for runtime failures.
"""


class IRBError(Exception):
    """Base class for all package errors."""

    exit_code = 3


class DimensionMismatch(IRBError):
    """Operands act on different numbers of qubits."""

    exit_code = 2


class NonUnitaryInput(IRBError):
    exit_code = 2


class NotTracePreserving(IRBError):
    exit_code = 2


class InvalidState(IRBError):
    exit_code = 2


class InvalidEffect(IRBError):
    exit_code = 2


class UnsupportedDimension(IRBError):
    exit_code = 2


class OutOfRange(IRBError):
    exit_code = 2


class InvalidDistribution(IRBError):
    exit_code = 2


class UnphysicalParameters(IRBError):
    exit_code = 2


class InsufficientData(IRBError):
    exit_code = 2


class MissingRawData(IRBError):
    exit_code = 2


class DivisionByZero(IRBError):
    """A fitted decay parameter collapsed below the numerical floor."""


class DataParseError(IRBError):
    exit_code = 2


class ConfigError(IRBError):
    exit_code = 2


class SimulationError(IRBError):
    pass
