"""Exception types raised by the library; each carries a CLI exit code."""


class MulticopyError(Exception):
    exit_code = 1


class UnsupportedPriorError(MulticopyError, ValueError):
    """Raised by entry points that are only defined for equal priors."""

    exit_code = 2


class ImpossibleOutcomeError(MulticopyError, ValueError):
    """Both conditional likelihoods of an outcome vanish."""

    exit_code = 4


class SizeLimitError(MulticopyError):
    """Requested copy number exceeds a configured resource ceiling."""

    exit_code = 3


class OptimizerError(MulticopyError, RuntimeError):
    exit_code = 4


class DegenerateFitError(MulticopyError, ValueError):
    exit_code = 4


class ConfigError(MulticopyError, ValueError):
    exit_code = 2
