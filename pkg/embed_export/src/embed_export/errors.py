class ConfigError(Exception):
    """Invalid command-line usage or option values."""


class ExportError(Exception):
    """Unreadable or malformed input data."""


class ModelUnavailableError(Exception):
    """The requested encoder cannot be loaded from disk or cache."""
