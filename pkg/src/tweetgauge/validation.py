"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np


def check_feature_matrix(X, dtype=np.float64) -> np.ndarray:
    """Coerce X to a 2-D array of the requested dtype and verify finiteness."""
    X = np.asarray(X, dtype=dtype)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got ndim={X.ndim}")
    if X.shape[0] == 0:
        raise ValueError("empty feature matrix")
    if np.issubdtype(X.dtype, np.floating) and not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def check_binary_labels(y, n_samples: int | None = None) -> np.ndarray:
    """Coerce labels to an int array and verify every entry is 0 or 1."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"labels must be 1-D, got ndim={y.ndim}")
    if y.shape[0] == 0:
        raise ValueError("empty label vector")
    values = np.unique(y)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"labels must be binary 0/1, found values {values.tolist()}")
    if n_samples is not None and y.shape[0] != n_samples:
        raise ValueError(f"labels have length {y.shape[0]}, expected {n_samples}")
    return y.astype(np.int64)


def check_consistent_length(*arrays) -> int:
    lengths = {len(a) for a in arrays}
    if len(lengths) != 1:
        raise ValueError(f"inputs have mismatched lengths: {sorted(lengths)}")
    return lengths.pop()


def check_fraction(value: float, name: str = "fraction") -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value


def check_binary_matrix(X) -> np.ndarray:
    """Validate a 0/1 feature matrix (bag-of-words input for the classic models)."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("expected a non-empty 2-D binary feature matrix")
    if X.dtype != np.uint8:
        if not np.all(np.isin(np.unique(X), (0, 1))):
            raise ValueError("feature matrix must contain only 0 and 1")
        X = X.astype(np.uint8)
    return X


def stratified_split_indices(
    y: np.ndarray, validation_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic stratified holdout split.

    The validation part has floor(fraction * n) items overall, apportioned to
    the classes by largest remainder, so each class count is within one item
    of exact proportionality.  Returns (train_indices, validation_indices),
    both in ascending order.
    """
    y = check_binary_labels(y)
    n = y.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    check_fraction(validation_fraction, "validation_fraction")
    n_val = int(np.floor(validation_fraction * n))
    if n_val < 1:
        raise ValueError(
            f"validation_fraction={validation_fraction} yields no validation items for n={n}"
        )

    classes = [0, 1]
    class_indices = {c: np.flatnonzero(y == c) for c in classes}
    exact = {c: n_val * len(class_indices[c]) / n for c in classes}
    quota = {c: int(np.floor(exact[c])) for c in classes}
    leftover = n_val - sum(quota.values())
    # Hand out the remaining slots by largest fractional remainder, label asc on ties.
    for c in sorted(classes, key=lambda c: (-(exact[c] - quota[c]), c)):
        if leftover == 0:
            break
        if quota[c] < len(class_indices[c]):
            quota[c] += 1
            leftover -= 1

    rng = np.random.default_rng(seed)
    val_parts = []
    for c in classes:
        idx = class_indices[c]
        if len(idx) == 0:
            continue
        picked = rng.permutation(len(idx))[: quota[c]]
        val_parts.append(idx[picked])
    val_idx = np.sort(np.concatenate(val_parts)) if val_parts else np.array([], dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[val_idx] = False
    train_idx = np.flatnonzero(mask)
    return train_idx, val_idx
