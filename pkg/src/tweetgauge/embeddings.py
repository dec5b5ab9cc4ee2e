"""Static word-vector tables, mean pooling, and precomputed contextual stores.

File formats:
  - word vectors: one ``word v1 v2 ... vd`` record per line, space separated.
    An optional leading ``<count> <dim>`` integer pair (fastText-style .vec
    header) is skipped.
  - contextual CLS file: first line ``#dim=<d>``, then ``id<TAB>v1,v2,...,vd``.
  - contextual token file: first line ``#dim=<d>``, then
    ``id<TAB>n<TAB>v1,...,vd;v1,...,vd;...`` with n semicolon-separated vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DatasetError

SOURCE_MEAN_POOLED = "mean_pooled"
SOURCE_CONTEXTUAL_CLS = "contextual_cls"


class WordEmbeddingTable:
    """Immutable word -> fixed-dimension vector lookup."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray]):
        self.dimension = dimension
        self._vectors = vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def get(self, word: str) -> np.ndarray | None:
        return self._vectors.get(word)


@dataclass(frozen=True)
class TweetEmbedding:
    vector: np.ndarray
    source: str
    # fraction of tokens found in the table; 0.0 flags an all-OOV tweet
    coverage: float = 1.0


def load_word_vectors(path: str | Path) -> WordEmbeddingTable:
    """Load a text-format vector table; dimension is inferred from the first
    record and later lines with a different arity are rejected by line number.
    Duplicate words keep their first occurrence."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"word-vector file not found: {path}")
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            if parts == [""]:
                continue
            if line_number == 1 and len(parts) == 2 and _both_ints(parts):
                continue  # fastText-style count/dim header
            word, components = parts[0], parts[1:]
            if dimension is None:
                if not components:
                    raise DatasetError(f"{path}: line {line_number}: no vector components")
                dimension = len(components)
            elif len(components) != dimension:
                raise DatasetError(
                    f"{path}: line {line_number}: expected {dimension} components, "
                    f"got {len(components)}"
                )
            try:
                vec = np.array(components, dtype=np.float32)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {line_number}: non-numeric vector component"
                ) from None
            if not np.all(np.isfinite(vec)):
                raise DatasetError(f"{path}: line {line_number}: non-finite vector component")
            if word not in vectors:
                vectors[word] = vec
    if dimension is None:
        raise DatasetError(f"{path}: no vector records found")
    return WordEmbeddingTable(dimension=dimension, vectors=vectors)


def _both_ints(parts: list[str]) -> bool:
    try:
        int(parts[0]), int(parts[1])
        return True
    except ValueError:
        return False


def mean_pool(tokens: Sequence[str], table: WordEmbeddingTable) -> TweetEmbedding:
    """Arithmetic mean of the vectors of the tokens present in the table.

    OOV tokens are skipped rather than averaged in as zeros; when no token is
    found the result is the zero vector with coverage 0.
    """
    total = np.zeros(table.dimension, dtype=np.float64)
    found = 0
    for t in tokens:
        vec = table.get(t)
        if vec is not None:
            total += vec
            found += 1
    if found == 0:
        return TweetEmbedding(vector=total, source=SOURCE_MEAN_POOLED, coverage=0.0)
    coverage = found / len(tokens)
    return TweetEmbedding(vector=total / found, source=SOURCE_MEAN_POOLED, coverage=coverage)


def token_vectors(
    tokens: Sequence[str], table: WordEmbeddingTable, max_length: int | None = None
) -> np.ndarray:
    """Per-token vector sequence for the recurrent model, OOV tokens skipped.

    An all-OOV (or empty) tweet yields a single zero vector so downstream
    models still receive a non-empty sequence.
    """
    rows = [table.get(t) for t in tokens]
    rows = [r for r in rows if r is not None]
    if max_length is not None:
        rows = rows[:max_length]
    if not rows:
        return np.zeros((1, table.dimension), dtype=np.float64)
    return np.stack(rows).astype(np.float64)


class MeanPoolVectorizer(TransformerMixin, BaseEstimator):
    """Transform token lists into mean-pooled tweet vectors."""

    def __init__(self, table: WordEmbeddingTable):
        self.table = table

    def fit(self, X=None, y=None) -> "MeanPoolVectorizer":
        return self

    def transform(self, X) -> np.ndarray:
        pooled = [mean_pool(getattr(item, "tokens", item), self.table) for item in X]
        self.coverage_ = np.array([p.coverage for p in pooled])
        if not pooled:
            return np.zeros((0, self.table.dimension), dtype=np.float64)
        return np.stack([p.vector for p in pooled])


class ContextualEmbeddingStore:
    """Per-tweet precomputed contextual vectors, indexed by tweet id."""

    def __init__(
        self,
        dimension: int,
        cls_vectors: dict[str, np.ndarray],
        token_sequences: dict[str, np.ndarray] | None = None,
    ):
        self.dimension = dimension
        self._cls = cls_vectors
        self._tokens = token_sequences

    def __len__(self) -> int:
        return len(self._cls)

    def __contains__(self, tweet_id: str) -> bool:
        return tweet_id in self._cls

    @property
    def has_token_sequences(self) -> bool:
        return self._tokens is not None

    def ids(self) -> list[str]:
        return list(self._cls)

    def cls_vector(self, tweet_id: str) -> np.ndarray:
        if tweet_id not in self._cls:
            raise KeyError(f"no contextual vector stored for tweet id {tweet_id!r}")
        return self._cls[tweet_id]

    def token_sequence(self, tweet_id: str) -> np.ndarray:
        if self._tokens is None:
            raise KeyError("this store was loaded without token sequences")
        if tweet_id not in self._tokens:
            raise KeyError(f"no token sequence stored for tweet id {tweet_id!r}")
        return self._tokens[tweet_id]


def _read_dim_header(line: str, path: Path) -> int:
    if not line.startswith("#dim="):
        raise DatasetError(f"{path}: first line must be '#dim=<d>', got {line!r}")
    try:
        dim = int(line[len("#dim="):])
    except ValueError:
        raise DatasetError(f"{path}: malformed dimension header {line!r}") from None
    if dim < 1:
        raise DatasetError(f"{path}: dimension must be positive, got {dim}")
    return dim


def _parse_vector(text: str, dim: int, path: Path, line_number: int) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != dim:
        raise DatasetError(
            f"{path}: line {line_number}: expected {dim} components, got {len(parts)}"
        )
    try:
        return np.array(parts, dtype=np.float64)
    except ValueError:
        raise DatasetError(f"{path}: line {line_number}: non-numeric component") from None


def load_contextual_store(
    cls_path: str | Path, tokens_path: str | Path | None = None
) -> ContextualEmbeddingStore:
    cls_path = Path(cls_path)
    if not cls_path.is_file():
        raise DatasetError(f"contextual CLS file not found: {cls_path}")
    cls_vectors: dict[str, np.ndarray] = {}
    with open(cls_path, encoding="utf-8") as fh:
        dim = _read_dim_header(fh.readline().rstrip("\n"), cls_path)
        for line_number, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetError(
                    f"{cls_path}: line {line_number}: expected id<TAB>components"
                )
            tweet_id, payload = parts
            if tweet_id in cls_vectors:
                raise DatasetError(
                    f"{cls_path}: line {line_number}: duplicate id {tweet_id!r}"
                )
            cls_vectors[tweet_id] = _parse_vector(payload, dim, cls_path, line_number)

    token_sequences: dict[str, np.ndarray] | None = None
    if tokens_path is not None:
        tokens_path = Path(tokens_path)
        if not tokens_path.is_file():
            raise DatasetError(f"contextual token file not found: {tokens_path}")
        token_sequences = {}
        with open(tokens_path, encoding="utf-8") as fh:
            tdim = _read_dim_header(fh.readline().rstrip("\n"), tokens_path)
            if tdim != dim:
                raise DatasetError(
                    f"{tokens_path}: token dimension {tdim} != CLS dimension {dim}"
                )
            for line_number, line in enumerate(fh, 2):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DatasetError(
                        f"{tokens_path}: line {line_number}: expected id<TAB>n<TAB>vectors"
                    )
                tweet_id, raw_n, payload = parts
                if tweet_id in token_sequences:
                    raise DatasetError(
                        f"{tokens_path}: line {line_number}: duplicate id {tweet_id!r}"
                    )
                if tweet_id not in cls_vectors:
                    raise DatasetError(
                        f"{tokens_path}: line {line_number}: id {tweet_id!r} has a token "
                        "sequence but no CLS vector"
                    )
                try:
                    n = int(raw_n)
                except ValueError:
                    raise DatasetError(
                        f"{tokens_path}: line {line_number}: bad vector count {raw_n!r}"
                    ) from None
                chunks = payload.split(";")
                if n < 1 or len(chunks) != n:
                    raise DatasetError(
                        f"{tokens_path}: line {line_number}: declared {n} vectors, "
                        f"found {len(chunks)}"
                    )
                token_sequences[tweet_id] = np.stack(
                    [_parse_vector(c, dim, tokens_path, line_number) for c in chunks]
                )
    return ContextualEmbeddingStore(
        dimension=dim, cls_vectors=cls_vectors, token_sequences=token_sequences
    )
