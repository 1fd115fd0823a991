"""Exception types shared by the engines, ingestion and the CLI."""


class HclustError(Exception):
    """Base class for all package errors."""


class DataError(HclustError, ValueError):
    """Input data is malformed, non-finite or otherwise unusable."""


class ConfigError(HclustError, ValueError):
    """A run was configured with invalid or contradictory options."""


class IncompatibleMethodError(ConfigError):
    """An engine was asked to run a criterion it cannot honour."""
