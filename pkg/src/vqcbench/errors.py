"""Exception types that the CLI maps to distinct exit codes."""


class ConfigError(Exception):
    """Invalid run configuration (bad flag value, unknown config key, ...)."""


class DataError(Exception):
    """Malformed or insufficient input data."""
