"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 1,
DatasetError -> 2, DivergenceError -> 3.
"""


class TweetgaugeError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(TweetgaugeError):
    """Invalid configuration, flag combination, or model/representation pairing."""


class DatasetError(TweetgaugeError):
    """Malformed or missing input data (CSV files, vector files, checkpoints)."""


class DivergenceError(TweetgaugeError):
    """Training produced a non-finite loss, typically a too-large learning rate."""
