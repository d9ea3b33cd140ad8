"""Exception hierarchy shared by all envib modules.

Three error families map onto the CLI exit codes: configuration problems
(bad parameters, malformed requests), ingestion problems (unreadable or
malformed input files), and degenerate math (inputs on which a formula
is undefined, e.g. an all-zero envelope).
"""


class EnvibError(Exception):
    """Base class for all package errors."""


class ConfigError(EnvibError):
    """Invalid configuration or parameters (bad fraction, counts, flags)."""


class InvalidSignalError(EnvibError):
    """Signal violates its invariants (non-finite samples, fs <= 0)."""


class SignalTooShortError(InvalidSignalError):
    """Signal shorter than the 16-sample minimum."""


class InvalidLengthError(EnvibError):
    """Signal length incompatible with the requested windowing."""


class IngestionError(EnvibError):
    """A recording file could not be read or parsed."""


class DegenerateInputError(EnvibError):
    """Input on which a formula is undefined (zero denominator)."""


class DegenerateDistributionError(DegenerateInputError):
    """Value distribution with zero entropy (all values identical)."""


class StratificationError(EnvibError):
    """A class has too few rows to stratify a train/test split."""


class EmptyDatasetError(EnvibError):
    """No usable rows remain after dropping degenerate segments."""
