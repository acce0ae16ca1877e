"""Exception hierarchy shared across the toolkit.

Three broad families map onto the CLI exit codes: configuration problems
(exit 2), data problems (exit 3), and child-process batch failures (exit 4).
"""


class SensaError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SensaError):
    """Invalid configuration value or unknown method/option."""


class UnsupportedDesignError(ConfigError):
    """Operation applied to a design kind that cannot support it."""


class StalePipelineError(ConfigError):
    """Stage input does not match the current configuration hash."""


class DataError(SensaError):
    """Base class for problems with the numbers themselves."""


class StructuralError(DataError):
    """Shape or alignment mismatch between related matrices."""


class DomainError(DataError):
    """Value outside its mathematically valid domain."""


class DegenerateInputError(DataError):
    """Input vector carries no usable signal (e.g. all-zero measures)."""


class DegenerateOutputError(DataError):
    """Output carries no variance, so variance-based measures are undefined."""


class NoDataError(DataError):
    """Every row/tuple/trajectory was filtered out."""


class InsufficientDataError(DataError):
    """Fewer valid rows than the estimator minimally requires."""


class SingularFitError(DataError):
    """Rank-deficient regression design."""


class ConditioningError(DataError):
    """Covariance matrix not positive definite even after jitter escalation."""


class NonConvergenceError(DataError):
    """Optimizer hit its iteration budget; best-found parameters attached."""

    def __init__(self, message, best_params=None):
        super().__init__(message)
        self.best_params = best_params


class SetupError(SensaError):
    """External simulator could not be started at all."""


class BatchQualityError(SensaError):
    """Too large a fraction of external simulator rows failed."""
