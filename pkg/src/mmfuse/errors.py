class FuseError(Exception):
    """Base class for errors raised by mmfuse."""


class DataError(FuseError, ValueError):
    """Input data is malformed, inconsistent or unsupported."""


class ConfigError(FuseError, ValueError):
    """An experiment configuration is invalid."""


class RuleSyntaxError(FuseError, ValueError):
    """Rule text could not be parsed."""
