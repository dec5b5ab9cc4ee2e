"""Frequency-cutoff vocabulary and binary bag-of-words vectors."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DatasetError


@dataclass(frozen=True)
class Vocabulary:
    """Immutable word -> dense index map.

    Indices form a contiguous bijection onto [0, len(vocab)); words are
    assigned indices in lexicographic order, so construction is deterministic.
    """

    word_to_index: dict[str, int]
    min_frequency: int = 1

    def __len__(self) -> int:
        return len(self.word_to_index)

    def __contains__(self, word: str) -> bool:
        return word in self.word_to_index

    def index(self, word: str) -> int | None:
        return self.word_to_index.get(word)

    def words(self) -> list[str]:
        """Words ordered by index."""
        return sorted(self.word_to_index, key=self.word_to_index.__getitem__)


def _token_lists(corpus: Iterable) -> Iterable[Sequence[str]]:
    for item in corpus:
        yield getattr(item, "tokens", item)


def build_vocabulary(corpus: Iterable, min_frequency: int = 1) -> Vocabulary:
    """Collect every word whose total token count reaches ``min_frequency``.

    Frequency counts token occurrences, not documents: a word appearing twice
    in one tweet counts 2.  Accepts TokenizedTweet objects or bare token lists.
    """
    if min_frequency < 1:
        raise ValueError(f"min_frequency must be >= 1, got {min_frequency}")
    counts: Counter[str] = Counter()
    n_items = 0
    for tokens in _token_lists(corpus):
        counts.update(tokens)
        n_items += 1
    if n_items == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    kept = sorted(w for w, c in counts.items() if c >= min_frequency)
    return Vocabulary(
        word_to_index={w: i for i, w in enumerate(kept)}, min_frequency=min_frequency
    )


def vectorize(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Binary presence vector of length len(vocab); OOV tokens are ignored."""
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")
    bits = np.zeros(len(vocab), dtype=np.uint8)
    lookup = vocab.word_to_index
    for t in tokens:
        i = lookup.get(t)
        if i is not None:
            bits[i] = 1
    return bits


def vectorize_indices(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Sparse view: sorted indices of the active bits."""
    lookup = vocab.word_to_index
    hits = {lookup[t] for t in tokens if t in lookup}
    return np.fromiter(sorted(hits), dtype=np.int64, count=len(hits))


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """One ``word<TAB>index`` line per entry, index order, UTF-8."""
    with open(path, "w", encoding="utf-8") as fh:
        for word in vocab.words():
            fh.write(f"{word}\t{vocab.word_to_index[word]}\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"vocabulary file not found: {path}")
    mapping: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetError(f"{path}: line {line_number}: expected word<TAB>index")
            word, raw_index = parts
            try:
                index = int(raw_index)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {line_number}: index {raw_index!r} is not an integer"
                ) from None
            if word in mapping:
                raise DatasetError(f"{path}: line {line_number}: duplicate word {word!r}")
            mapping[word] = index
    if sorted(mapping.values()) != list(range(len(mapping))):
        raise DatasetError(f"{path}: indices are not a contiguous 0..n-1 range")
    return Vocabulary(word_to_index=mapping)


class BowVectorizer(TransformerMixin, BaseEstimator):
    """Fit a frequency-cutoff vocabulary, transform token lists to 0/1 matrices."""

    def __init__(self, min_frequency: int = 2):
        self.min_frequency = min_frequency

    def fit(self, X: Iterable, y=None) -> "BowVectorizer":
        self.vocabulary_ = build_vocabulary(X, self.min_frequency)
        return self

    def transform(self, X: Iterable) -> np.ndarray:
        if not hasattr(self, "vocabulary_"):
            raise ValueError("BowVectorizer is not fitted")
        rows = [vectorize(tokens, self.vocabulary_) for tokens in _token_lists(X)]
        if not rows:
            return np.zeros((0, len(self.vocabulary_)), dtype=np.uint8)
        return np.stack(rows)
