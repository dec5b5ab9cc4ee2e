"""Shared fixtures built on the synthetic-data helpers in synthdata.py."""

from __future__ import annotations

from pathlib import Path

import pytest

from synthdata import CALM_PHRASES, DISASTER_PHRASES, FILLERS, synthetic_rows, write_train_csv


@pytest.fixture
def tiny_corpus_csv(tmp_path: Path) -> Path:
    return write_train_csv(tmp_path / "train.csv", synthetic_rows(120))


@pytest.fixture
def corpus_words() -> set[str]:
    words: set[str] = set()
    for phrase in DISASTER_PHRASES + CALM_PHRASES:
        words.update(phrase.split())
    words.update(FILLERS)
    return words
