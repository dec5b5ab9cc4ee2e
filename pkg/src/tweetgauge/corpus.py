"""Dataset loading, text preprocessing, corpus statistics, and splits.

The expected CSV schema is ``id,keyword,location,text,target`` for labeled
files and the same without ``target`` for unlabeled ones; ``keyword`` and
``location`` are read and ignored.  Text fields may contain quoted commas,
embedded quotes, and newlines (RFC-4180 quoting, UTF-8).
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError
from .validation import stratified_split_indices

_NON_ALNUM = re.compile(r"[^a-z0-9]+")

_LABELED_HEADER = ["id", "keyword", "location", "text", "target"]
_UNLABELED_HEADER = ["id", "keyword", "location", "text"]


@dataclass(frozen=True)
class Tweet:
    id: str
    raw_text: str
    label: int | None = None


@dataclass(frozen=True)
class TokenizedTweet:
    id: str
    tokens: tuple[str, ...]
    label: int | None = None


@dataclass(frozen=True)
class CorpusStats:
    total_tweets: int
    total_positive: int
    unique_words: int
    unique_words_min_freq_2: int
    mean_length: float
    median_length: float
    max_length: int
    min_length: int
    # token length -> (positive_count, negative_count)
    length_histogram_by_label: dict[int, tuple[int, int]]
    # label -> [(word, frequency), ...] sorted by frequency desc, then word asc
    top_words_by_label: dict[int, list[tuple[str, int]]]


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the bundled stop-word list, or a user-supplied one-per-line file."""
    if path is None:
        text = resources.files("tweetgauge.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        p = Path(path)
        if not p.is_file():
            raise DatasetError(f"stop-word file not found: {p}")
        text = p.read_text("utf-8")
    return frozenset(w for w in (line.strip() for line in text.splitlines()) if w)


_DEFAULT_STOPWORDS: frozenset[str] | None = None


def default_stopwords() -> frozenset[str]:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


def preprocess(raw_text: str, stopwords: frozenset[str] | None = None) -> list[str]:
    """Lowercase, map every character outside [a-z0-9] to a space, split,
    and drop stop words.  Numeric tokens are kept; URLs end up split into
    their alphanumeric fragments."""
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = _NON_ALNUM.sub(" ", raw_text.lower()).split()
    return [t for t in tokens if t not in stopwords]


def tokenize_corpus(
    tweets: Iterable[Tweet], stopwords: frozenset[str] | None = None
) -> list[TokenizedTweet]:
    if stopwords is None:
        stopwords = default_stopwords()
    return [
        TokenizedTweet(id=t.id, tokens=tuple(preprocess(t.raw_text, stopwords)), label=t.label)
        for t in tweets
    ]


def load_dataset(path: str | Path, has_labels: bool) -> list[Tweet]:
    """Read one tweet per CSV data row, in file order."""
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    expected_header = _LABELED_HEADER if has_labels else _UNLABELED_HEADER

    tweets: list[Tweet] = []
    seen_ids: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: file is empty, expected a CSV header") from None
        if [h.strip().lower() for h in header] != expected_header:
            raise DatasetError(
                f"{path}: unexpected header {header!r}, expected {','.join(expected_header)}"
            )
        for row_number, row in enumerate(reader, start=1):
            if len(row) != len(expected_header):
                raise DatasetError(
                    f"{path}: row {row_number} has {len(row)} fields, "
                    f"expected {len(expected_header)}"
                )
            tweet_id = row[0]
            if tweet_id in seen_ids:
                raise DatasetError(f"{path}: row {row_number}: duplicate id {tweet_id!r}")
            seen_ids.add(tweet_id)
            label: int | None = None
            if has_labels:
                raw_label = row[4].strip()
                if raw_label not in ("0", "1"):
                    raise DatasetError(
                        f"{path}: row {row_number}: label must be 0 or 1, got {raw_label!r}"
                    )
                label = int(raw_label)
            tweets.append(Tweet(id=tweet_id, raw_text=row[3], label=label))
    return tweets


def compute_stats(corpus: Sequence[TokenizedTweet]) -> CorpusStats:
    """Corpus statistics over preprocessed tokens.

    The median uses the lower middle element for even-sized corpora.
    """
    if len(corpus) == 0:
        raise ValueError("cannot compute statistics of an empty corpus")
    if any(t.label is None for t in corpus):
        raise ValueError("all tweets must be labeled to compute corpus statistics")

    lengths = [len(t.tokens) for t in corpus]
    word_counts: Counter[str] = Counter()
    counts_by_label: dict[int, Counter[str]] = {0: Counter(), 1: Counter()}
    histogram: dict[int, list[int]] = {}
    positives = 0
    for t in corpus:
        word_counts.update(t.tokens)
        counts_by_label[t.label].update(t.tokens)
        bucket = histogram.setdefault(len(t.tokens), [0, 0])
        if t.label == 1:
            positives += 1
            bucket[0] += 1
        else:
            bucket[1] += 1

    sorted_lengths = sorted(lengths)
    n = len(corpus)
    top_words = {
        label: sorted(counter.items(), key=lambda item: (-item[1], item[0]))
        for label, counter in counts_by_label.items()
    }
    return CorpusStats(
        total_tweets=n,
        total_positive=positives,
        unique_words=len(word_counts),
        unique_words_min_freq_2=sum(1 for c in word_counts.values() if c >= 2),
        mean_length=sum(lengths) / n,
        median_length=float(sorted_lengths[(n - 1) // 2]),
        max_length=max(lengths),
        min_length=min(lengths),
        length_histogram_by_label={k: tuple(v) for k, v in sorted(histogram.items())},
        top_words_by_label=top_words,
    )


def split_train_validation(
    corpus: Sequence, validation_fraction: float, seed: int
) -> tuple[list, list]:
    """Deterministic stratified split into (train, validation) parts.

    Items must carry a binary ``label``.  The validation part holds
    floor(fraction * n) items with class counts within one of proportional;
    both parts preserve the original corpus order.
    """
    if len(corpus) < 2:
        raise ValueError("corpus too small to split")
    if any(t.label is None for t in corpus):
        raise ValueError("all items must be labeled to stratify the split")
    labels = np.array([t.label for t in corpus])
    train_idx, val_idx = stratified_split_indices(labels, validation_fraction, seed)
    return [corpus[i] for i in train_idx], [corpus[i] for i in val_idx]


def write_stats_report(stats: CorpusStats, out_dir: str | Path, top_n: int = 50) -> list[Path]:
    """Emit the statistics as UTF-8 CSV tables and return the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    summary = out_dir / "stats_summary.csv"
    with open(summary, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value"])
        w.writerow(["total_tweets", stats.total_tweets])
        w.writerow(["total_positive", stats.total_positive])
        w.writerow(["unique_words", stats.unique_words])
        w.writerow(["unique_words_min_freq_2", stats.unique_words_min_freq_2])
        w.writerow(["mean_length", repr(stats.mean_length)])
        w.writerow(["median_length", repr(stats.median_length)])
        w.writerow(["max_length", stats.max_length])
        w.writerow(["min_length", stats.min_length])
    written.append(summary)

    hist = out_dir / "length_histogram.csv"
    with open(hist, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["token_length", "positive_count", "negative_count"])
        for length, (pos, neg) in stats.length_histogram_by_label.items():
            w.writerow([length, pos, neg])
    written.append(hist)

    for label, name in ((1, "positive"), (0, "negative")):
        path = out_dir / f"top_words_{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["rank", "word", "frequency"])
            for rank, (word, freq) in enumerate(stats.top_words_by_label[label][:top_n], 1):
                w.writerow([rank, word, freq])
        written.append(path)
    return written
