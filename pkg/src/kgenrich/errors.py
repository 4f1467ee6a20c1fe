"""Exception types shared across the package.

Exit-code mapping in the CLI: ConfigError/UsageError -> 1, DataFormatError
and I/O errors -> 2.
"""


class KgEnrichError(Exception):
    pass


class ConfigError(KgEnrichError):
    """Missing or inconsistent configuration (bad key, missing mapping...)."""


class UsageError(ConfigError):
    """Bad command-line invocation."""


class DataFormatError(KgEnrichError):
    """Malformed input data beyond the tolerated threshold."""
