"""Exception hierarchy shared across the package.

Every error raised on a documented contract boundary derives from
``TwinError`` and carries a short machine-readable ``category`` used by the
CLI for exit reporting.
"""


class TwinError(Exception):
    category = "error"


class DimensionError(TwinError, ValueError):
    """Array shapes inconsistent with the operation's contract."""

    category = "dimension"


class NumericError(TwinError, ArithmeticError):
    """Non-finite values where finite ones are required."""

    category = "numeric"


class StateError(TwinError, RuntimeError):
    """Operation invoked before its prerequisite state exists."""

    category = "state"


class ConfigError(TwinError, ValueError):
    """Invalid configuration value or unknown configuration key."""

    category = "config"


class SchemaError(TwinError, ValueError):
    """Structured input does not match its published schema."""

    category = "schema"


class PreconditionError(TwinError, ValueError):
    """Documented precondition violated by the caller."""

    category = "precondition"


class BalanceError(TwinError, ValueError):
    """Class balancing requested on a single-class dataset."""

    category = "balance"


class TrainingError(TwinError, RuntimeError):
    """Training diverged or could not proceed."""

    category = "training"


class SaturationError(TwinError, ValueError):
    """Queueing model evaluated at or beyond saturation."""

    category = "saturation"


class DomainError(TwinError, ValueError):
    """Input outside the domain a model was trained or defined on."""

    category = "domain"


class LeakageError(TwinError, ValueError):
    """Evaluation data overlaps training data."""

    category = "leakage"
