"""From-scratch tree, forest, and logistic-regression learners over binary
bag-of-words features.

All three expose probability-like scores in [0, 1] so they can be ranked with
ROC-AUC.  Split selection maximizes the Gini impurity decrease; with binary
features a node's children are fixed (left = feature absent, right = present),
so each candidate feature yields exactly one split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import DivergenceError
from .validation import check_binary_labels, check_binary_matrix

SCORE_CLAMP = 1e-6


@dataclass(frozen=True)
class DecisionTreeModel:
    """Array-encoded binary-feature CART tree.

    ``feature[i] == -1`` marks node i as a leaf; otherwise ``left[i]`` /
    ``right[i]`` are the child node ids for feature value 0 / 1.  ``value[i]``
    is the positive-label fraction of the training samples at node i.
    """

    feature: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int
    max_depth: int | None
    min_samples_split: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Leaf positive fraction for every row of X."""
        X = _check_features(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = np.flatnonzero(feat >= 0)
            if active.size == 0:
                break
            present = X[active, feat[active]] == 1
            node[active] = np.where(
                present, self.right[node[active]], self.left[node[active]]
            )
        return self.value[node]


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[DecisionTreeModel, ...]
    n_trees: int
    features_per_split: int
    seed: int
    bootstrap: bool

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def scores(self, X: np.ndarray) -> np.ndarray:
        """Mean of member-tree leaf fractions, hence in [0, 1]."""
        X = _check_features(X, self.n_features)
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.scores(X)
        return total / self.n_trees


@dataclass(frozen=True)
class LogisticRegressionModel:
    weights: np.ndarray
    bias: float
    l2_lambda: float

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def scores(self, X: np.ndarray) -> np.ndarray:
        X = _check_features(X, self.n_features)
        return _sigmoid(X.astype(np.float64) @ self.weights + self.bias)


def _check_features(X, n_features: int) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != n_features:
        raise ValueError(
            f"feature length mismatch: model expects {n_features}, got {X.shape[1]}"
        )
    return X


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# Decision tree


def _best_split(X_node: np.ndarray, y_node: np.ndarray, candidates: np.ndarray) -> int | None:
    """Feature index maximizing the Gini impurity decrease, or None when no
    candidate split improves on the parent.  Ties break to the lowest index
    (candidates are sorted ascending and argmax keeps the first maximum).

    For child counts (pos, neg) with n = pos + neg, weighted Gini equals
    n_parent - S where S = sum over children of (pos^2 + neg^2) / n, so
    maximizing S maximizes the impurity decrease.
    """
    n = X_node.shape[0]
    pos_total = int(y_node.sum())
    neg_total = n - pos_total

    sub = X_node[:, candidates]
    n_right = sub.sum(axis=0, dtype=np.int64)
    pos_right = sub[y_node == 1].sum(axis=0, dtype=np.int64)
    neg_right = n_right - pos_right
    n_left = n - n_right
    pos_left = pos_total - pos_right
    neg_left = neg_total - neg_right

    valid = (n_left > 0) & (n_right > 0)
    score = np.full(len(candidates), -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (pos_left**2 + neg_left**2) / n_left + (pos_right**2 + neg_right**2) / n_right
    score[valid] = raw[valid]

    best = int(np.argmax(score))
    parent_score = (pos_total**2 + neg_total**2) / n
    if score[best] > parent_score:
        return int(candidates[best])
    return None


def _grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    max_depth: int | None,
    min_samples_split: int,
    rng: np.random.Generator | None = None,
    features_per_split: int | None = None,
) -> DecisionTreeModel:
    n, d = X.shape
    all_features = np.arange(d)
    feature: list[int] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node(fraction: float) -> int:
        feature.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(fraction)
        return len(feature) - 1

    root = new_node(float(y.sum()) / n)
    stack = [(root, np.arange(n), 0)]
    while stack:
        node_id, idx, depth = stack.pop()
        y_node = y[idx]
        pos = int(y_node.sum())
        n_node = len(idx)
        if (
            pos == 0
            or pos == n_node
            or n_node < min_samples_split
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        if features_per_split is None or features_per_split >= d:
            candidates = all_features
        else:
            candidates = np.sort(rng.choice(d, size=features_per_split, replace=False))
        X_node = X[idx]
        feat = _best_split(X_node, y_node, candidates)
        if feat is None:
            continue
        present = X_node[:, feat] == 1
        left_idx = idx[~present]
        right_idx = idx[present]
        left_id = new_node(float(y[left_idx].sum()) / len(left_idx))
        right_id = new_node(float(y[right_idx].sum()) / len(right_idx))
        feature[node_id] = feat
        left[node_id] = left_id
        right[node_id] = right_id
        # Left pushed last so it is grown first; fixes the rng draw order.
        stack.append((right_id, right_idx, depth + 1))
        stack.append((left_id, left_idx, depth + 1))

    return DecisionTreeModel(
        feature=np.array(feature, dtype=np.int64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        n_features=d,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
    )


def train_decision_tree(
    X, y, max_depth: int | None = None, min_samples_split: int = 2
) -> DecisionTreeModel:
    """Greedy CART on binary features: at each node pick the feature with the
    largest Gini impurity decrease; stop on pure nodes, nodes smaller than
    min_samples_split, or when no split improves impurity."""
    X = check_binary_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    if min_samples_split < 2:
        raise ValueError("min_samples_split must be at least 2")
    return _grow_tree(X, y, max_depth=max_depth, min_samples_split=min_samples_split)


def _bootstrap_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    # Must stay the first draw from the per-tree rng stream so that
    # out_of_bag_scores can re-derive the same sample.
    return rng.integers(0, n, size=n)


def train_random_forest(
    X,
    y,
    n_trees: int = 100,
    features_per_split: int | None = None,
    seed: int = 0,
    bootstrap: bool = True,
    max_depth: int | None = None,
    min_samples_split: int = 2,
) -> RandomForestModel:
    """Bagged CART trees with per-node feature subsampling.

    Each tree uses an independent rng stream seeded from (seed, tree_index),
    so results are deterministic regardless of evaluation order.  The default
    features_per_split is ceil(sqrt(n_features)).
    """
    X = check_binary_matrix(X)
    y = check_binary_labels(y, X.shape[0])
    n, d = X.shape
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    if features_per_split is None:
        features_per_split = math.ceil(math.sqrt(d))
    if not 1 <= features_per_split <= d:
        raise ValueError(f"features_per_split must lie in [1, {d}], got {features_per_split}")

    trees = []
    for tree_index in range(n_trees):
        rng = np.random.default_rng([seed, tree_index])
        if bootstrap:
            sample = _bootstrap_indices(rng, n)
            X_t, y_t = X[sample], y[sample]
        else:
            X_t, y_t = X, y
        trees.append(
            _grow_tree(
                X_t,
                y_t,
                max_depth=max_depth,
                min_samples_split=min_samples_split,
                rng=rng,
                features_per_split=features_per_split,
            )
        )
    return RandomForestModel(
        trees=tuple(trees),
        n_trees=n_trees,
        features_per_split=features_per_split,
        seed=seed,
        bootstrap=bootstrap,
    )


def out_of_bag_scores(model: RandomForestModel, X) -> np.ndarray:
    """Per-row mean score over the trees whose bootstrap sample missed the row.

    X must be the training matrix the forest was fitted on.  Rows that every
    tree sampled come back as NaN.
    """
    if not model.bootstrap:
        raise ValueError("out-of-bag scores require a bootstrap-sampled forest")
    X = check_binary_matrix(X)
    n = X.shape[0]
    total = np.zeros(n, dtype=np.float64)
    count = np.zeros(n, dtype=np.int64)
    for tree_index, tree in enumerate(model.trees):
        rng = np.random.default_rng([model.seed, tree_index])
        sample = _bootstrap_indices(rng, n)
        oob = np.ones(n, dtype=bool)
        oob[sample] = False
        if not oob.any():
            continue
        total[oob] += tree.scores(X[oob])
        count[oob] += 1
    with np.errstate(invalid="ignore"):
        return np.where(count > 0, total / np.maximum(count, 1), np.nan)


# ---------------------------------------------------------------------------
# Logistic regression


def logistic_loss(weights: np.ndarray, bias: float, X, y, l2_lambda: float) -> float:
    """Mean binary cross-entropy plus (l2_lambda/2)*||w||^2 (bias unpenalized),
    computed stably from logits."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = X @ weights + bias
    per_sample = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z))) - z * y
    return float(per_sample.mean() + 0.5 * l2_lambda * weights @ weights)


def logistic_gradient(
    weights: np.ndarray, bias: float, X, y, l2_lambda: float
) -> tuple[np.ndarray, float]:
    """Analytic gradient of logistic_loss with respect to (weights, bias)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    residual = _sigmoid(X @ weights + bias) - y
    grad_w = X.T @ residual / X.shape[0] + l2_lambda * weights
    grad_b = float(residual.mean())
    return grad_w, grad_b


def train_logistic_regression(
    X,
    y,
    learning_rate: float = 0.1,
    epochs: int = 300,
    l2_lambda: float | None = None,
    seed: int = 0,
) -> LogisticRegressionModel:
    """Full-batch gradient descent on the L2-regularized mean binary
    cross-entropy, starting from zero weights.  The default l2_lambda is
    1/n_samples.  The seed argument is accepted for interface uniformity;
    zero initialization and full batches make the procedure deterministic."""
    model, _ = fit_logistic_regression(
        X, y, learning_rate=learning_rate, epochs=epochs, l2_lambda=l2_lambda, seed=seed
    )
    return model


def fit_logistic_regression(
    X,
    y,
    learning_rate: float = 0.1,
    epochs: int = 300,
    l2_lambda: float | None = None,
    seed: int = 0,
) -> tuple[LogisticRegressionModel, list[float]]:
    """As train_logistic_regression, also returning the per-epoch loss curve
    (epochs + 1 values: the loss before each update and after the last)."""
    X = check_binary_matrix(X).astype(np.float64)
    y = check_binary_labels(y, X.shape[0]).astype(np.float64)
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    n, d = X.shape
    if l2_lambda is None:
        l2_lambda = 1.0 / n
    if l2_lambda < 0:
        raise ValueError("l2_lambda must be non-negative")

    w = np.zeros(d, dtype=np.float64)
    b = 0.0
    losses: list[float] = []
    for _ in range(epochs):
        loss = logistic_loss(w, b, X, y, l2_lambda)
        if not np.isfinite(loss):
            raise DivergenceError(
                "logistic regression loss became non-finite; lower the learning rate"
            )
        losses.append(loss)
        grad_w, grad_b = logistic_gradient(w, b, X, y, l2_lambda)
        w -= learning_rate * grad_w
        b -= learning_rate * grad_b
    final = logistic_loss(w, b, X, y, l2_lambda)
    if not np.isfinite(final):
        raise DivergenceError(
            "logistic regression loss became non-finite; lower the learning rate"
        )
    losses.append(final)
    return LogisticRegressionModel(weights=w, bias=b, l2_lambda=l2_lambda), losses


# ---------------------------------------------------------------------------
# Shared scoring surface

Model = DecisionTreeModel | RandomForestModel | LogisticRegressionModel


def predict_score(model: Model, x) -> float:
    """Probability-like score for a single feature vector: leaf positive
    fraction (tree), mean over trees (forest), or sigmoid(w.x + b) (logistic).
    The hard label is score >= 0.5."""
    return float(model.scores(np.asarray(x).reshape(1, -1))[0])


def predict_scores(model: Model, X) -> np.ndarray:
    return model.scores(X)


def clamp_scores(scores: np.ndarray) -> np.ndarray:
    """Clip scores into [1e-6, 1 - 1e-6] before AUC/log-loss so that exact 0/1
    leaf fractions cannot produce degenerate ties or infinite loss."""
    return np.clip(scores, SCORE_CLAMP, 1.0 - SCORE_CLAMP)


# ---------------------------------------------------------------------------
# Estimator wrappers


class DecisionTreeClassifier(ClassifierMixin, BaseEstimator):
    """CART decision tree for binary 0/1 feature matrices."""

    def __init__(self, max_depth: int | None = None, min_samples_split: int = 2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, X, y) -> "DecisionTreeClassifier":
        self.model_ = train_decision_tree(
            X, y, max_depth=self.max_depth, min_samples_split=self.min_samples_split
        )
        self.classes_ = np.array([0, 1])
        return self

    def predict_proba(self, X) -> np.ndarray:
        s = self.model_.scores(X)
        return np.column_stack([1.0 - s, s])

    def predict(self, X) -> np.ndarray:
        return (self.model_.scores(X) >= 0.5).astype(np.int64)


class RandomForestClassifier(ClassifierMixin, BaseEstimator):
    """Bagged decision trees with per-node feature subsampling."""

    def __init__(
        self,
        n_trees: int = 100,
        features_per_split: int | None = None,
        seed: int = 0,
        bootstrap: bool = True,
        max_depth: int | None = None,
        min_samples_split: int = 2,
    ):
        self.n_trees = n_trees
        self.features_per_split = features_per_split
        self.seed = seed
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split

    def fit(self, X, y) -> "RandomForestClassifier":
        self.model_ = train_random_forest(
            X,
            y,
            n_trees=self.n_trees,
            features_per_split=self.features_per_split,
            seed=self.seed,
            bootstrap=self.bootstrap,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
        )
        self.classes_ = np.array([0, 1])
        return self

    def predict_proba(self, X) -> np.ndarray:
        s = self.model_.scores(X)
        return np.column_stack([1.0 - s, s])

    def predict(self, X) -> np.ndarray:
        return (self.model_.scores(X) >= 0.5).astype(np.int64)


class LogisticRegressionClassifier(ClassifierMixin, BaseEstimator):
    """Full-batch gradient-descent logistic regression."""

    def __init__(
        self,
        learning_rate: float = 0.1,
        epochs: int = 300,
        l2_lambda: float | None = None,
        seed: int = 0,
    ):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2_lambda = l2_lambda
        self.seed = seed

    def fit(self, X, y) -> "LogisticRegressionClassifier":
        self.model_, self.loss_curve_ = fit_logistic_regression(
            X,
            y,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            l2_lambda=self.l2_lambda,
            seed=self.seed,
        )
        self.classes_ = np.array([0, 1])
        return self

    def predict_proba(self, X) -> np.ndarray:
        s = self.model_.scores(X)
        return np.column_stack([1.0 - s, s])

    def predict(self, X) -> np.ndarray:
        return (self.model_.scores(X) >= 0.5).astype(np.int64)
