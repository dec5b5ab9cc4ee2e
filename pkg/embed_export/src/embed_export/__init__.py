"""Offline contextual-embedding exporter for tweet CSVs."""

from .dataset import TweetRow, read_tweets
from .errors import ConfigError, ExportError, ModelUnavailableError
from .exporter import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MODEL,
    Encoder,
    ExportManifest,
    export_cls,
    export_tokens,
    load_encoder,
    load_manifest,
    manifest_path,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DEFAULT_BATCH_SIZE",
    "DEFAULT_MAX_TOKENS",
    "DEFAULT_MODEL",
    "Encoder",
    "ExportError",
    "ExportManifest",
    "ModelUnavailableError",
    "TweetRow",
    "export_cls",
    "export_tokens",
    "load_encoder",
    "load_manifest",
    "manifest_path",
    "read_tweets",
]
