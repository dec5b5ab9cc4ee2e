"""Neural classifiers: a softmax head over tweet vectors and a from-scratch
bidirectional LSTM over token-vector sequences.

Both trainers share one early-stopped loop: mini-batch gradient descent with
per-epoch seeded shuffling, validation loss on a stratified holdout after
every epoch, and a halt once the validation loss has failed to improve
(strict <) for `patience` consecutive epochs.  Parameters from the best
validation epoch are returned.

Gradients are implemented by hand (softmax cross-entropy gradient;
full backpropagation-through-time for the BiLSTM) and are verified against
central finite differences by `gradient_check`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np

from .errors import ConfigError, DivergenceError
from .validation import check_binary_labels, check_fraction, stratified_split_indices

LOSS_CATEGORICAL = "categorical_cross_entropy"
LOSS_BINARY = "binary_cross_entropy"

GRADIENT_CLIP_NORM = 5.0

T = TypeVar("T")


# ---------------------------------------------------------------------------
# Training configuration and report


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.05
    patience: int = 10
    validation_fraction: float = 0.01
    seed: int = 0
    loss: str = LOSS_CATEGORICAL

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")
        check_fraction(self.validation_fraction, "validation_fraction")
        if self.loss not in (LOSS_CATEGORICAL, LOSS_BINARY):
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass(frozen=True)
class TrainReport:
    epochs_run: int
    train_losses: tuple[float, ...]
    val_losses: tuple[float, ...]
    best_epoch: int
    stopped_early: bool

    def __post_init__(self):
        if len(self.train_losses) != self.epochs_run or len(self.val_losses) != self.epochs_run:
            raise ValueError("loss curves must have one entry per epoch run")
        if not 1 <= self.best_epoch <= self.epochs_run:
            raise ValueError("best_epoch must lie within the epochs run")

    def to_csv(self) -> str:
        lines = ["epoch,train_loss,val_loss"]
        for epoch, (tl, vl) in enumerate(zip(self.train_losses, self.val_losses), 1):
            lines.append(f"{epoch},{tl!r},{vl!r}")
        return "\n".join(lines) + "\n"


def run_training_loop(
    train_epoch: Callable[[int], float],
    validation_loss: Callable[[], float],
    snapshot: Callable[[], T],
    config: TrainConfig,
) -> tuple[T, TrainReport]:
    """Drive epochs with early stopping.

    `train_epoch(epoch)` runs one pass of updates and returns the train loss;
    `validation_loss()` scores the current parameters; `snapshot()` deep-copies
    them.  Stops after `max_epochs`, or as soon as `patience` epochs pass
    without strict validation improvement; the best epoch's snapshot is
    returned.  Epochs are numbered from 1.
    """
    best_val = np.inf
    best_epoch = 0
    best_params = snapshot()
    train_curve: list[float] = []
    val_curve: list[float] = []
    stopped_early = False
    epochs_run = 0
    for epoch in range(1, config.max_epochs + 1):
        train_loss = float(train_epoch(epoch))
        val_loss = float(validation_loss())
        if not np.isfinite(train_loss) or not np.isfinite(val_loss):
            raise DivergenceError(
                f"non-finite loss at epoch {epoch} "
                f"(train={train_loss}, val={val_loss}); lower the learning rate"
            )
        train_curve.append(train_loss)
        val_curve.append(val_loss)
        epochs_run = epoch
        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best_params = snapshot()
        if epoch - best_epoch >= config.patience:
            stopped_early = True
            break
    report = TrainReport(
        epochs_run=epochs_run,
        train_losses=tuple(train_curve),
        val_losses=tuple(val_curve),
        best_epoch=best_epoch,
        stopped_early=stopped_early,
    )
    return best_params, report


# ---------------------------------------------------------------------------
# Shared numerics


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _binary_ce_from_logits(logits: np.ndarray, y: np.ndarray) -> float:
    per = np.maximum(logits, 0.0) + np.log1p(np.exp(-np.abs(logits))) - logits * y
    return float(per.mean())


def _as_matrix(vectors) -> np.ndarray:
    rows = [np.asarray(getattr(v, "vector", v), dtype=np.float64) for v in vectors]
    if not rows:
        raise ValueError("empty input")
    V = np.stack(rows)
    if V.ndim != 2:
        raise ValueError(f"expected rank-2 input, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise ValueError("input vectors contain non-finite values")
    return V


# ---------------------------------------------------------------------------
# Softmax classifier


def softmax_probability(v, Z) -> np.ndarray:
    """p(label = i) = exp(Z_i . v) / sum_k exp(Z_k . v), computed with
    max-subtraction so large logits cannot overflow."""
    v = np.asarray(v, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if v.ndim != 1 or Z.ndim != 2:
        raise ValueError("expected a vector v and a matrix Z")
    if Z.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: Z is {Z.shape}, v has length {v.shape[0]}")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(Z))):
        raise ValueError("non-finite input")
    logits = Z @ v
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _softmax_loss(Z: np.ndarray, V: np.ndarray, y: np.ndarray) -> float:
    logp = _log_softmax(V @ Z.T)
    return float(-logp[np.arange(len(y)), y].mean())


def _softmax_loss_and_grad(
    Z: np.ndarray, V: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean categorical cross-entropy over the batch and its gradient in Z."""
    n = len(y)
    logp = _log_softmax(V @ Z.T)
    loss = float(-logp[np.arange(n), y].mean())
    probs = np.exp(logp)
    probs[np.arange(n), y] -= 1.0
    grad = probs.T @ V / n
    return loss, grad


@dataclass(frozen=True)
class SoftmaxClassifier:
    """Two-label softmax head; row k of Z holds the logit weights of label k."""

    Z: np.ndarray

    def __post_init__(self):
        if self.Z.ndim != 2 or self.Z.shape[0] != 2:
            raise ValueError(f"Z must have shape (2, d), got {self.Z.shape}")
        if not np.all(np.isfinite(self.Z)):
            raise ValueError("Z contains non-finite values")

    @property
    def input_dim(self) -> int:
        return self.Z.shape[1]

    def probabilities(self, v) -> np.ndarray:
        return softmax_probability(v, self.Z)

    def score(self, v) -> float:
        return float(self.probabilities(v)[1])

    def scores(self, vectors) -> np.ndarray:
        V = _as_matrix(vectors)
        if V.shape[1] != self.input_dim:
            raise ValueError(
                f"dimension mismatch: model expects {self.input_dim}, got {V.shape[1]}"
            )
        return np.exp(_log_softmax(V @ self.Z.T))[:, 1]


def train_softmax(
    vectors, y, config: TrainConfig | None = None
) -> tuple[SoftmaxClassifier, TrainReport]:
    """Mini-batch SGD on the categorical cross-entropy with per-epoch seeded
    shuffling; Z starts from seeded uniform(-0.05, 0.05)."""
    if config is None:
        config = TrainConfig(learning_rate=0.05, loss=LOSS_CATEGORICAL)
    if config.loss != LOSS_CATEGORICAL:
        raise ConfigError(f"softmax training minimizes {LOSS_CATEGORICAL}, got {config.loss!r}")
    V = _as_matrix(vectors)
    y = check_binary_labels(y, V.shape[0])
    train_idx, val_idx = stratified_split_indices(y, config.validation_fraction, config.seed)
    V_tr, y_tr = V[train_idx], y[train_idx]
    V_val, y_val = V[val_idx], y[val_idx]
    n_tr = len(y_tr)

    rng = np.random.default_rng(config.seed)
    Z = rng.uniform(-0.05, 0.05, size=(2, V.shape[1]))

    def train_epoch(_epoch: int) -> float:
        perm = rng.permutation(n_tr)
        total = 0.0
        for start in range(0, n_tr, config.batch_size):
            batch = perm[start : start + config.batch_size]
            loss, grad = _softmax_loss_and_grad(Z, V_tr[batch], y_tr[batch])
            Z[...] -= config.learning_rate * grad
            total += loss * len(batch)
        return total / n_tr

    best_Z, report = run_training_loop(
        train_epoch,
        lambda: _softmax_loss(Z, V_val, y_val),
        lambda: Z.copy(),
        config,
    )
    return SoftmaxClassifier(Z=best_Z), report


# ---------------------------------------------------------------------------
# Bidirectional LSTM

# Gate weight rows are stacked in the fixed order input, forget, output,
# candidate: wx[(g*H):((g+1)*H)] multiplies x for gate g, likewise wh for
# h_prev and bias.
_GATE_ORDER = ("input", "forget", "output", "candidate")


@dataclass(frozen=True)
class LstmCellParams:
    wx: np.ndarray  # (4H, input_dim)
    wh: np.ndarray  # (4H, H)
    bias: np.ndarray  # (4H,)

    def __post_init__(self):
        if self.wx.ndim != 2 or self.wh.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("wx and wh must be matrices, bias a vector")
        four_h = self.wx.shape[0]
        if four_h % 4 != 0:
            raise ValueError("first dimension of wx must be a multiple of 4")
        h = four_h // 4
        if self.wh.shape != (four_h, h) or self.bias.shape != (four_h,):
            raise ValueError(
                f"inconsistent shapes: wx {self.wx.shape}, wh {self.wh.shape}, "
                f"bias {self.bias.shape}"
            )

    @property
    def hidden_size(self) -> int:
        return self.wx.shape[0] // 4

    @property
    def input_dim(self) -> int:
        return self.wx.shape[1]

    @classmethod
    def from_gates(
        cls, w_i, u_i, b_i, w_f, u_f, b_f, w_o, u_o, b_o, w_g, u_g, b_g
    ) -> "LstmCellParams":
        """Build stacked parameters from the per-gate matrices of the standard
        LSTM equations (W x + U h_prev + b per gate)."""
        wx = np.vstack([np.atleast_2d(m) for m in (w_i, w_f, w_o, w_g)]).astype(np.float64)
        wh = np.vstack([np.atleast_2d(m) for m in (u_i, u_f, u_o, u_g)]).astype(np.float64)
        bias = np.concatenate(
            [np.atleast_1d(b).astype(np.float64) for b in (b_i, b_f, b_o, b_g)]
        )
        return cls(wx=wx, wh=wh, bias=bias)


def lstm_cell_step(x, h_prev, c_prev, params: LstmCellParams) -> tuple[np.ndarray, np.ndarray]:
    """One LSTM step: i = sig(W_i x + U_i h + b_i), f, o likewise,
    g = tanh(W_g x + U_g h + b_g); c = f*c_prev + i*g; h = o*tanh(c).

    Accepts a single vector or a batch (leading axis)."""
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x, h_prev, c_prev = x[None], h_prev[None], c_prev[None]
    H = params.hidden_size
    if x.shape[1] != params.input_dim or h_prev.shape[1] != H or c_prev.shape[1] != H:
        raise ValueError(
            f"shape mismatch: x {x.shape}, h {h_prev.shape}, c {c_prev.shape} for "
            f"input_dim {params.input_dim}, hidden {H}"
        )
    pre = x @ params.wx.T + h_prev @ params.wh.T + params.bias
    i = _sigmoid(pre[:, :H])
    f = _sigmoid(pre[:, H : 2 * H])
    o = _sigmoid(pre[:, 2 * H : 3 * H])
    g = np.tanh(pre[:, 3 * H :])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    if single:
        return h[0], c[0]
    return h, c


@dataclass(frozen=True)
class BiLstmClassifier:
    forward_cell: LstmCellParams
    backward_cell: LstmCellParams
    output_weights: np.ndarray  # (2H,) forward half first
    output_bias: float
    hidden_size: int
    max_sequence_length: int

    def __post_init__(self):
        H = self.hidden_size
        if self.forward_cell.hidden_size != H or self.backward_cell.hidden_size != H:
            raise ValueError("cell hidden sizes must match hidden_size")
        if self.forward_cell.input_dim != self.backward_cell.input_dim:
            raise ValueError("forward and backward cells must share the input dimension")
        if self.output_weights.shape != (2 * H,):
            raise ValueError(f"output_weights must have shape (2H,) = ({2 * H},)")
        if self.max_sequence_length < 1:
            raise ValueError("max_sequence_length must be at least 1")

    @property
    def input_dim(self) -> int:
        return self.forward_cell.input_dim

    def score(self, sequence) -> float:
        return bilstm_score(sequence, self)

    def scores(self, sequences) -> np.ndarray:
        return bilstm_scores(sequences, self)


def _params_dict(model: BiLstmClassifier) -> dict[str, np.ndarray]:
    return {
        "fwd_wx": model.forward_cell.wx,
        "fwd_wh": model.forward_cell.wh,
        "fwd_bias": model.forward_cell.bias,
        "bwd_wx": model.backward_cell.wx,
        "bwd_wh": model.backward_cell.wh,
        "bwd_bias": model.backward_cell.bias,
        "out_w": model.output_weights,
        "out_b": np.array([model.output_bias]),
    }


def _model_from_params(
    params: dict[str, np.ndarray], hidden_size: int, max_sequence_length: int
) -> BiLstmClassifier:
    return BiLstmClassifier(
        forward_cell=LstmCellParams(
            wx=params["fwd_wx"], wh=params["fwd_wh"], bias=params["fwd_bias"]
        ),
        backward_cell=LstmCellParams(
            wx=params["bwd_wx"], wh=params["bwd_wh"], bias=params["bwd_bias"]
        ),
        output_weights=params["out_w"],
        output_bias=float(params["out_b"][0]),
        hidden_size=hidden_size,
        max_sequence_length=max_sequence_length,
    )


def _run_direction(
    X: np.ndarray, wx: np.ndarray, wh: np.ndarray, bias: np.ndarray, reverse: bool
) -> tuple[np.ndarray, list[tuple]]:
    """Run one LSTM direction over a uniform-length batch X of shape (B,T,D);
    returns the final hidden state and per-step caches in processing order."""
    B, T, _ = X.shape
    H = wx.shape[0] // 4
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    caches = []
    steps = range(T - 1, -1, -1) if reverse else range(T)
    for t in steps:
        x_t = X[:, t, :]
        pre = x_t @ wx.T + h @ wh.T + bias
        i = _sigmoid(pre[:, :H])
        f = _sigmoid(pre[:, H : 2 * H])
        o = _sigmoid(pre[:, 2 * H : 3 * H])
        g = np.tanh(pre[:, 3 * H :])
        c_new = f * c + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        caches.append((x_t, h, c, i, f, o, g, tanh_c))
        h, c = h_new, c_new
    return h, caches


def _direction_backward(
    dh_last: np.ndarray, caches: list[tuple], wx: np.ndarray, wh: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """BPTT through one direction, with gradient flowing in only from the
    final hidden state."""
    H = wx.shape[0] // 4
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    dbias = np.zeros(wx.shape[0])
    dh = dh_last
    dc = np.zeros((dh_last.shape[0], H))
    for x_t, h_prev, c_prev, i, f, o, g, tanh_c in reversed(caches):
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        d_pre = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                do * o * (1.0 - o),
                dg * (1.0 - g**2),
            ],
            axis=1,
        )
        dwx += d_pre.T @ x_t
        dwh += d_pre.T @ h_prev
        dbias += d_pre.sum(axis=0)
        dh = d_pre @ wh
        dc = dc * f
    return dwx, dwh, dbias


def _bilstm_logits(params: dict[str, np.ndarray], X: np.ndarray) -> tuple[np.ndarray, tuple]:
    h_f, caches_f = _run_direction(
        X, params["fwd_wx"], params["fwd_wh"], params["fwd_bias"], reverse=False
    )
    h_b, caches_b = _run_direction(
        X, params["bwd_wx"], params["bwd_wh"], params["bwd_bias"], reverse=True
    )
    concat = np.concatenate([h_f, h_b], axis=1)
    logits = concat @ params["out_w"] + params["out_b"][0]
    return logits, (caches_f, caches_b, concat)


def _bilstm_loss_and_grads(
    params: dict[str, np.ndarray], X: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean binary cross-entropy over the batch plus full-BPTT gradients for
    every parameter."""
    B = X.shape[0]
    H = params["fwd_wx"].shape[0] // 4
    logits, (caches_f, caches_b, concat) = _bilstm_logits(params, X)
    loss = _binary_ce_from_logits(logits, y)
    dlogits = (_sigmoid(logits) - y) / B
    grads = {
        "out_w": concat.T @ dlogits,
        "out_b": np.array([dlogits.sum()]),
    }
    dconcat = np.outer(dlogits, params["out_w"])
    grads["fwd_wx"], grads["fwd_wh"], grads["fwd_bias"] = _direction_backward(
        dconcat[:, :H], caches_f, params["fwd_wx"], params["fwd_wh"]
    )
    grads["bwd_wx"], grads["bwd_wh"], grads["bwd_bias"] = _direction_backward(
        dconcat[:, H:], caches_b, params["bwd_wx"], params["bwd_wh"]
    )
    return loss, grads


def _clip_gradients(grads: dict[str, np.ndarray], max_norm: float = GRADIENT_CLIP_NORM) -> None:
    total = np.sqrt(sum(float((g**2).sum()) for g in grads.values()))
    if total > max_norm:
        scale = max_norm / total
        for g in grads.values():
            g *= scale


def _check_sequences(sequences, max_sequence_length: int) -> list[np.ndarray]:
    if len(sequences) == 0:
        raise ValueError("empty input")
    out = []
    dim = None
    for k, seq in enumerate(sequences):
        seq = np.asarray(seq, dtype=np.float64)
        if seq.ndim != 2 or seq.shape[0] == 0:
            raise ValueError(f"sequence {k} must be a non-empty (length, dim) array")
        if dim is None:
            dim = seq.shape[1]
        elif seq.shape[1] != dim:
            raise ValueError(
                f"sequence {k} has dimension {seq.shape[1]}, expected {dim}"
            )
        out.append(seq[:max_sequence_length])
    return out


def _length_batches(lengths: list[int], order, batch_size: int) -> list[np.ndarray]:
    """Chunk `order` into pad-free batches: indices are bucketed by sequence
    length (buckets visited in ascending length, members keeping `order`'s
    relative order) and each bucket is split into runs of `batch_size`."""
    buckets: dict[int, list[int]] = {}
    for idx in order:
        buckets.setdefault(lengths[idx], []).append(idx)
    batches = []
    for length in sorted(buckets):
        members = buckets[length]
        for start in range(0, len(members), batch_size):
            batches.append(np.array(members[start : start + batch_size], dtype=np.int64))
    return batches


def bilstm_score(sequence, model: BiLstmClassifier) -> float:
    """Score one token-vector sequence: forward cell reads left to right,
    backward cell right to left; the two final hidden states are concatenated
    (forward first) and passed through the output layer and sigmoid."""
    seq = np.asarray(sequence, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] == 0:
        raise ValueError("sequence must be a non-empty (length, dim) array")
    seq = seq[: model.max_sequence_length]
    if seq.shape[1] != model.input_dim:
        raise ValueError(
            f"dimension mismatch: model expects {model.input_dim}, got {seq.shape[1]}"
        )
    logits, _ = _bilstm_logits(_params_dict(model), seq[None])
    return float(_sigmoid(logits)[0])


def bilstm_scores(sequences, model: BiLstmClassifier) -> np.ndarray:
    seqs = _check_sequences(sequences, model.max_sequence_length)
    if seqs[0].shape[1] != model.input_dim:
        raise ValueError(
            f"dimension mismatch: model expects {model.input_dim}, got {seqs[0].shape[1]}"
        )
    params = _params_dict(model)
    lengths = [len(s) for s in seqs]
    out = np.empty(len(seqs), dtype=np.float64)
    for batch in _length_batches(lengths, range(len(seqs)), 256):
        X = np.stack([seqs[i] for i in batch])
        logits, _ = _bilstm_logits(params, X)
        out[batch] = _sigmoid(logits)
    return out


def train_bilstm(
    sequences,
    y,
    config: TrainConfig | None = None,
    *,
    hidden_size: int = 128,
    max_sequence_length: int = 32,
) -> tuple[BiLstmClassifier, TrainReport]:
    """Mini-batch gradient descent with full BPTT through both directions.

    Parameters start from seeded uniform(-1/sqrt(hidden), 1/sqrt(hidden));
    gradients are clipped to global norm 5.0; batches are pad-free (grouped by
    sequence length).  Early stopping matches train_softmax.
    """
    if config is None:
        config = TrainConfig(learning_rate=0.01, loss=LOSS_BINARY)
    if config.loss != LOSS_BINARY:
        raise ConfigError(f"bilstm training minimizes {LOSS_BINARY}, got {config.loss!r}")
    seqs = _check_sequences(sequences, max_sequence_length)
    y = check_binary_labels(y, len(seqs))
    input_dim = seqs[0].shape[1]
    train_idx, val_idx = stratified_split_indices(y, config.validation_fraction, config.seed)

    rng = np.random.default_rng(config.seed)
    bound = 1.0 / np.sqrt(hidden_size)
    H4 = 4 * hidden_size
    params = {
        "fwd_wx": rng.uniform(-bound, bound, (H4, input_dim)),
        "fwd_wh": rng.uniform(-bound, bound, (H4, hidden_size)),
        "fwd_bias": rng.uniform(-bound, bound, H4),
        "bwd_wx": rng.uniform(-bound, bound, (H4, input_dim)),
        "bwd_wh": rng.uniform(-bound, bound, (H4, hidden_size)),
        "bwd_bias": rng.uniform(-bound, bound, H4),
        "out_w": rng.uniform(-bound, bound, 2 * hidden_size),
        "out_b": rng.uniform(-bound, bound, 1),
    }

    lengths = [len(s) for s in seqs]
    y_arr = y.astype(np.float64)

    def batch_arrays(batch: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return np.stack([seqs[i] for i in batch]), y_arr[batch]

    def train_epoch(_epoch: int) -> float:
        order = train_idx[rng.permutation(len(train_idx))]
        total = 0.0
        for batch in _length_batches(lengths, order, config.batch_size):
            X, yb = batch_arrays(batch)
            loss, grads = _bilstm_loss_and_grads(params, X, yb)
            _clip_gradients(grads)
            for name, g in grads.items():
                params[name] -= config.learning_rate * g
            total += loss * len(batch)
        return total / len(train_idx)

    def validation_loss() -> float:
        total = 0.0
        for batch in _length_batches(lengths, val_idx, config.batch_size):
            X, yb = batch_arrays(batch)
            logits, _ = _bilstm_logits(params, X)
            total += _binary_ce_from_logits(logits, yb) * len(batch)
        return total / len(val_idx)

    best_params, report = run_training_loop(
        train_epoch,
        validation_loss,
        lambda: {k: v.copy() for k, v in params.items()},
        config,
    )
    return _model_from_params(best_params, hidden_size, max_sequence_length), report


# ---------------------------------------------------------------------------
# Gradient checking


@dataclass(frozen=True)
class GradientCheckInstance:
    """Sizes and seed of the randomized instance a gradient check runs on."""

    input_dim: int = 4
    hidden_size: int = 3
    sequence_length: int = 4
    batch_size: int = 3
    seed: int = 0


def _relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return np.abs(analytic - numeric) / denom


def gradient_check(
    kind: str, instance: GradientCheckInstance | None = None, step: float = 1e-5
) -> float:
    """Compare analytic gradients against central finite differences
    component-by-component and return the maximum relative error,
    |a - n| / max(|a|, |n|, 1e-8)."""
    if step <= 0:
        raise ValueError("step must be positive")
    if instance is None:
        instance = GradientCheckInstance()
    rng = np.random.default_rng(instance.seed)
    if kind == "softmax":
        V = rng.normal(size=(instance.batch_size, instance.input_dim))
        y = rng.integers(0, 2, size=instance.batch_size)
        Z = rng.uniform(-0.05, 0.05, size=(2, instance.input_dim))
        _, analytic = _softmax_loss_and_grad(Z, V, y)
        numeric = np.zeros_like(Z)
        for idx in np.ndindex(Z.shape):
            saved = Z[idx]
            Z[idx] = saved + step
            hi = _softmax_loss(Z, V, y)
            Z[idx] = saved - step
            lo = _softmax_loss(Z, V, y)
            Z[idx] = saved
            numeric[idx] = (hi - lo) / (2.0 * step)
        return float(_relative_errors(analytic, numeric).max())
    if kind == "bilstm":
        H = instance.hidden_size
        D = instance.input_dim
        bound = 1.0 / np.sqrt(H)
        params = {
            "fwd_wx": rng.uniform(-bound, bound, (4 * H, D)),
            "fwd_wh": rng.uniform(-bound, bound, (4 * H, H)),
            "fwd_bias": rng.uniform(-bound, bound, 4 * H),
            "bwd_wx": rng.uniform(-bound, bound, (4 * H, D)),
            "bwd_wh": rng.uniform(-bound, bound, (4 * H, H)),
            "bwd_bias": rng.uniform(-bound, bound, 4 * H),
            "out_w": rng.uniform(-bound, bound, 2 * H),
            "out_b": rng.uniform(-bound, bound, 1),
        }
        X = rng.normal(size=(instance.batch_size, instance.sequence_length, D))
        y = rng.integers(0, 2, size=instance.batch_size).astype(np.float64)
        _, analytic = _bilstm_loss_and_grads(params, X, y)
        worst = 0.0
        for name, arr in params.items():
            numeric = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                saved = arr[idx]
                arr[idx] = saved + step
                hi, _ = _bilstm_logits(params, X)
                hi_loss = _binary_ce_from_logits(hi, y)
                arr[idx] = saved - step
                lo, _ = _bilstm_logits(params, X)
                lo_loss = _binary_ce_from_logits(lo, y)
                arr[idx] = saved
                numeric[idx] = (hi_loss - lo_loss) / (2.0 * step)
            worst = max(worst, float(_relative_errors(analytic[name], numeric).max()))
        return worst
    raise ValueError(f"unknown model kind {kind!r}; expected 'softmax' or 'bilstm'")
