"""Reader for the tweet CSV consumed and produced by the benchmark harness.

The exporter deliberately keeps the raw tweet text: contextual encoders are
trained on natural language and apply their own tokenization, so no
lowercasing, punctuation stripping, or stop-word removal happens here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import ExportError

REQUIRED_COLUMNS = ("id", "keyword", "location", "text")


@dataclass(frozen=True)
class TweetRow:
    id: str
    text: str


def read_tweets(path: str | Path) -> list[TweetRow]:
    """Return (id, raw text) for every data row, in file order.

    Accepts both labeled files (trailing ``target`` column) and unlabeled
    ones. Quoted fields may contain commas and newlines.
    """
    path = Path(path)
    if not path.is_file():
        raise ExportError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ExportError(f"{path}: empty file, expected a CSV header") from None
        if tuple(header[: len(REQUIRED_COLUMNS)]) != REQUIRED_COLUMNS or len(header) > len(
            REQUIRED_COLUMNS
        ) + 1:
            raise ExportError(
                f"{path}: expected header id,keyword,location,text[,target], "
                f"got {','.join(header)}"
            )
        width = len(header)
        rows: list[TweetRow] = []
        seen: set[str] = set()
        for row_number, row in enumerate(reader, 2):
            if len(row) != width:
                raise ExportError(
                    f"{path}: row {row_number}: expected {width} fields, got {len(row)}"
                )
            tweet_id = row[0].strip()
            if not tweet_id:
                raise ExportError(f"{path}: row {row_number}: empty id")
            if tweet_id in seen:
                raise ExportError(f"{path}: row {row_number}: duplicate id {tweet_id!r}")
            seen.add(tweet_id)
            rows.append(TweetRow(id=tweet_id, text=row[3]))
    return rows
