"""Run a pretrained contextual encoder over tweets and write embedding files.

Two export modes, both in the text formats the benchmark harness loads:

- ``cls``: one whole-sequence summary vector per tweet — the final-layer
  hidden state at the sequence-start marker position. File format: a
  ``#dim=<d>`` header, then ``id<TAB>c1,c2,...,cd`` per tweet.
- ``tokens``: the final-layer hidden state of every real token (the
  sequence-start and sequence-end marker positions are excluded), truncated
  to ``max_tokens``. File format: a ``#dim=<d>`` header, then
  ``id<TAB>n<TAB>vec1;vec2;...;vecn`` per tweet.

Inference is deterministic: evaluation mode, no sampling, fixed batch order.
Re-running an export with the same model, input, and settings produces
byte-identical files. Floats are written with six decimal places.

A tweet whose text yields no encoder tokens (for example an empty string)
still gets a line: the whole-sequence embedding is written in its place (as
a single vector in ``tokens`` mode) and the tweet id is recorded in the
manifest warnings.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import torch

from .dataset import TweetRow, read_tweets
from .errors import ConfigError, ModelUnavailableError

DEFAULT_MODEL = "bert-base-uncased"
DEFAULT_MAX_TOKENS = 32
DEFAULT_BATCH_SIZE = 32
EXPORTED_LAYER = "last"
MODES = ("cls", "tokens")
_FLOAT = "{:.6f}"


@dataclass(frozen=True)
class Encoder:
    """A loaded tokenizer/model pair ready for inference."""

    name: str
    tokenizer: object
    model: object

    @property
    def hidden_size(self) -> int:
        return int(self.model.config.hidden_size)

    @property
    def max_input_length(self) -> int:
        """Longest token sequence (markers included) the encoder accepts."""
        declared = int(getattr(self.tokenizer, "model_max_length", 0) or 0)
        positional = int(self.model.config.max_position_embeddings)
        if declared <= 0:
            return positional
        return min(declared, positional)


@dataclass(frozen=True)
class ExportManifest:
    """Provenance sidecar written next to every export."""

    model: str
    layer: str
    mode: str
    dimension: int
    tweet_count: int
    input_sha256: str
    max_tokens: int | None
    warnings: tuple[str, ...]

    def to_text(self) -> str:
        lines = [
            f"model = {self.model}",
            f"layer = {self.layer}",
            f"mode = {self.mode}",
            f"dimension = {self.dimension}",
            f"tweet_count = {self.tweet_count}",
            f"input_sha256 = {self.input_sha256}",
        ]
        if self.max_tokens is not None:
            lines.append(f"max_tokens = {self.max_tokens}")
        lines.extend(f"warning = {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"


def manifest_path(output_path: str | Path) -> Path:
    return Path(f"{output_path}.manifest.txt")


def load_manifest(path: str | Path) -> ExportManifest:
    path = Path(path)
    fields: dict[str, str] = {}
    warnings: list[str] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(" = ")
        if key == "warning":
            warnings.append(value)
        else:
            fields[key] = value
    return ExportManifest(
        model=fields["model"],
        layer=fields["layer"],
        mode=fields["mode"],
        dimension=int(fields["dimension"]),
        tweet_count=int(fields["tweet_count"]),
        input_sha256=fields["input_sha256"],
        max_tokens=int(fields["max_tokens"]) if "max_tokens" in fields else None,
        warnings=tuple(warnings),
    )


def load_encoder(name_or_dir: str | Path = DEFAULT_MODEL) -> Encoder:
    """Load a tokenizer/model pair from a local directory or the model cache."""
    from transformers import AutoModel, AutoTokenizer

    try:
        from transformers.utils import logging as hf_logging

        hf_logging.disable_progress_bar()
    except (ImportError, AttributeError):
        pass

    name = str(name_or_dir)
    try:
        tokenizer = AutoTokenizer.from_pretrained(name)
        model = AutoModel.from_pretrained(name)
    except Exception as exc:
        raise ModelUnavailableError(f"cannot load encoder {name!r}: {exc}") from exc
    model.eval()
    return Encoder(name=name, tokenizer=tokenizer, model=model)


def _resolve_encoder(model: str | Path | Encoder) -> Encoder:
    if isinstance(model, Encoder):
        return model
    return load_encoder(model)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _batches(rows: Sequence[TweetRow], size: int) -> Iterator[Sequence[TweetRow]]:
    for start in range(0, len(rows), size):
        yield rows[start : start + size]


def _hidden_states(
    encoder: Encoder, texts: list[str], max_length: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """Final-layer hidden states for a batch: (attention mask, states)."""
    encoded = encoder.tokenizer(
        texts,
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    with torch.no_grad():
        hidden = encoder.model(**encoded).last_hidden_state
    return encoded["attention_mask"], hidden


def _format_vector(vector) -> str:
    return ",".join(_FLOAT.format(float(x)) for x in vector)


def _no_token_warning(tweet_id: str) -> str:
    return (
        f"tweet id {tweet_id!r} produced no encoder tokens; "
        "wrote the whole-sequence embedding instead"
    )


def _run_export(
    input_csv: str | Path,
    output_path: str | Path,
    mode: str,
    model: str | Path | Encoder,
    batch_size: int,
    max_tokens: int | None,
) -> ExportManifest:
    if batch_size < 1:
        raise ConfigError(f"batch_size must be at least 1, got {batch_size}")
    encoder = _resolve_encoder(model)
    rows = read_tweets(input_csv)
    output_path = Path(output_path)
    if output_path.parent != Path(""):
        output_path.parent.mkdir(parents=True, exist_ok=True)

    if mode == "tokens":
        # markers occupy two positions on top of the exported tokens
        max_length = min(encoder.max_input_length, max_tokens + 2)
    else:
        max_length = encoder.max_input_length

    warnings: list[str] = []
    with open(output_path, "w", encoding="utf-8", newline="\n") as out:
        out.write(f"#dim={encoder.hidden_size}\n")
        for batch in _batches(rows, batch_size):
            mask, hidden = _hidden_states(encoder, [r.text for r in batch], max_length)
            for i, row in enumerate(batch):
                real = int(mask[i].sum())
                n_tokens = real - 2  # drop the start/end marker positions
                if n_tokens <= 0:
                    warnings.append(_no_token_warning(row.id))
                if mode == "cls":
                    out.write(f"{row.id}\t{_format_vector(hidden[i, 0])}\n")
                elif n_tokens <= 0:
                    out.write(f"{row.id}\t1\t{_format_vector(hidden[i, 0])}\n")
                else:
                    vectors = ";".join(
                        _format_vector(hidden[i, j]) for j in range(1, 1 + n_tokens)
                    )
                    out.write(f"{row.id}\t{n_tokens}\t{vectors}\n")

    manifest = ExportManifest(
        model=encoder.name,
        layer=EXPORTED_LAYER,
        mode=mode,
        dimension=encoder.hidden_size,
        tweet_count=len(rows),
        input_sha256=_sha256(Path(input_csv)),
        max_tokens=max_tokens,
        warnings=tuple(warnings),
    )
    manifest_path(output_path).write_text(manifest.to_text(), encoding="utf-8")
    return manifest


def export_cls(
    input_csv: str | Path,
    output_path: str | Path,
    *,
    model: str | Path | Encoder = DEFAULT_MODEL,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> ExportManifest:
    """Write one whole-sequence summary vector per tweet."""
    return _run_export(input_csv, output_path, "cls", model, batch_size, None)


def export_tokens(
    input_csv: str | Path,
    output_path: str | Path,
    *,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    model: str | Path | Encoder = DEFAULT_MODEL,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> ExportManifest:
    """Write the per-token final-layer states, marker positions excluded."""
    if max_tokens < 1:
        raise ConfigError(f"max_tokens must be at least 1, got {max_tokens}")
    return _run_export(input_csv, output_path, "tokens", model, batch_size, max_tokens)
