"""Synthetic corpora, CSV writers, and word-vector files shared by the tests."""

from __future__ import annotations

import csv
import random
from pathlib import Path

import numpy as np

DISASTER_PHRASES = [
    "fire burns the forest tonight",
    "earthquake hits city center hard",
    "flood waters rise in the valley",
    "storm destroys homes near coast",
    "wildfire evacuation ordered for county residents",
    "collapsed bridge blocks the highway",
]
CALM_PHRASES = [
    "lovely sunny picnic with friends",
    "new song album release party",
    "cute cat sleeps on the sofa",
    "great pizza dinner with family",
    "reading a fun book in the garden",
    "weekend football match was brilliant",
]
FILLERS = ["today", "now", "again", "wow", "ok", "really"]


def synthetic_rows(n: int, seed: int = 4) -> list[tuple[str, str, str, str, str]]:
    """Balanced labeled tweet rows (id, keyword, location, text, target)."""
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        positive = i % 2 == 0
        base = rng.choice(DISASTER_PHRASES if positive else CALM_PHRASES)
        text = base + " " + rng.choice(FILLERS)
        rows.append((str(i + 1), "", "", text, "1" if positive else "0"))
    return rows


def write_train_csv(path: Path, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "keyword", "location", "text", "target"])
        writer.writerows(rows)
    return path


def write_test_csv(path: Path, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "keyword", "location", "text"])
        for row in rows:
            writer.writerow(row[:4])
    return path


def write_vector_file(path: Path, words, dim: int = 8, seed: int = 0) -> Path:
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for word in sorted(set(words)):
            vec = rng.normal(size=dim)
            fh.write(word + " " + " ".join(f"{x:.5f}" for x in vec) + "\n")
    return path
