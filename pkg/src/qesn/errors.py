"""Exception hierarchy. Each class carries a short ``category`` used by the CLI."""


class QesnError(Exception):
    category = "error"


class CapacityError(QesnError):
    category = "capacity"


class OperandError(QesnError, ValueError):
    category = "operand"


class ShapeError(QesnError, ValueError):
    category = "shape"


class NumericalDegeneracyError(QesnError, ArithmeticError):
    category = "numerical"


class NormalizationError(QesnError, ValueError):
    category = "normalization"


class DataError(QesnError, ValueError):
    category = "data"


class ConfigError(QesnError, ValueError):
    category = "config"


class IntegrationError(QesnError, ArithmeticError):
    category = "integration"


class InitError(QesnError):
    category = "init"


class ConvergenceError(QesnError, ArithmeticError):
    category = "convergence"
