"""Versioned flat-text checkpoints for every model family.

Layout (UTF-8, line oriented):

    tweetgauge-checkpoint v1
    model=<decision_tree|random_forest|logistic_regression|softmax|bilstm>
    representation=<bow|static_vectors|contextual_cls|contextual_tokens>
    meta <key> <value>          (zero or more free-form metadata pairs)
    vocab <n>                   (bag-of-words models only; n `word<TAB>index` lines)
    field <name> <value>        (scalar hyperparameters)
    vector <name> <n>           (one line of n space-separated floats)
    matrix <name> <rows> <cols> (rows lines of cols floats)
    tree <index> <n_nodes>      (n_nodes lines: feature left right value)
    end

Floats are written with repr(), which round-trips exactly, so saving a loaded
model reproduces the file byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bow import Vocabulary
from .classic import DecisionTreeModel, LogisticRegressionModel, RandomForestModel
from .errors import DatasetError
from .neural import BiLstmClassifier, LstmCellParams, SoftmaxClassifier

MAGIC = "tweetgauge-checkpoint v1"

REPRESENTATIONS = ("bow", "static_vectors", "contextual_cls", "contextual_tokens")

_KIND_BY_TYPE = {
    DecisionTreeModel: "decision_tree",
    RandomForestModel: "random_forest",
    LogisticRegressionModel: "logistic_regression",
    SoftmaxClassifier: "softmax",
    BiLstmClassifier: "bilstm",
}


@dataclass(frozen=True)
class Checkpoint:
    model_kind: str
    model: object
    representation: str
    metadata: dict[str, str] = field(default_factory=dict)
    vocabulary: Vocabulary | None = None


# ---------------------------------------------------------------------------
# Writing


def _float_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _write_tree(lines: list[str], index: int, tree: DecisionTreeModel) -> None:
    lines.append(f"tree {index} {tree.n_nodes}")
    for i in range(tree.n_nodes):
        lines.append(
            f"{int(tree.feature[i])} {int(tree.left[i])} {int(tree.right[i])} "
            f"{float(tree.value[i])!r}"
        )


def _write_matrix(lines: list[str], name: str, m: np.ndarray) -> None:
    lines.append(f"matrix {name} {m.shape[0]} {m.shape[1]}")
    for row in m:
        lines.append(_float_row(row))


def _write_vector(lines: list[str], name: str, v: np.ndarray) -> None:
    lines.append(f"vector {name} {len(v)}")
    lines.append(_float_row(v))


def save_checkpoint(
    path: str | Path,
    model,
    *,
    representation: str,
    metadata: dict[str, str] | None = None,
    vocabulary: Vocabulary | None = None,
) -> None:
    kind = _KIND_BY_TYPE.get(type(model))
    if kind is None:
        raise ValueError(f"cannot checkpoint object of type {type(model).__name__}")
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")

    lines = [MAGIC, f"model={kind}", f"representation={representation}"]
    for key in sorted(metadata or {}):
        value = str((metadata or {})[key])
        if any(c in key for c in " \t\n") or "\n" in value:
            raise ValueError(f"metadata entry {key!r} contains whitespace separators")
        lines.append(f"meta {key} {value}")
    if vocabulary is not None:
        lines.append(f"vocab {len(vocabulary)}")
        for index, word in enumerate(vocabulary.words()):
            lines.append(f"{word}\t{index}")

    if kind == "decision_tree":
        lines.append(f"field max_depth {model.max_depth if model.max_depth is not None else 'none'}")
        lines.append(f"field min_samples_split {model.min_samples_split}")
        lines.append(f"field n_features {model.n_features}")
        _write_tree(lines, 0, model)
    elif kind == "random_forest":
        first = model.trees[0]
        lines.append(f"field n_trees {model.n_trees}")
        lines.append(f"field features_per_split {model.features_per_split}")
        lines.append(f"field seed {model.seed}")
        lines.append(f"field bootstrap {int(model.bootstrap)}")
        lines.append(f"field max_depth {first.max_depth if first.max_depth is not None else 'none'}")
        lines.append(f"field min_samples_split {first.min_samples_split}")
        lines.append(f"field n_features {first.n_features}")
        for i, tree in enumerate(model.trees):
            _write_tree(lines, i, tree)
    elif kind == "logistic_regression":
        lines.append(f"field bias {float(model.bias)!r}")
        lines.append(f"field l2_lambda {float(model.l2_lambda)!r}")
        _write_vector(lines, "weights", model.weights)
    elif kind == "softmax":
        _write_matrix(lines, "Z", model.Z)
    elif kind == "bilstm":
        lines.append(f"field hidden_size {model.hidden_size}")
        lines.append(f"field max_sequence_length {model.max_sequence_length}")
        lines.append(f"field output_bias {float(model.output_bias)!r}")
        _write_matrix(lines, "fwd_wx", model.forward_cell.wx)
        _write_matrix(lines, "fwd_wh", model.forward_cell.wh)
        _write_vector(lines, "fwd_bias", model.forward_cell.bias)
        _write_matrix(lines, "bwd_wx", model.backward_cell.wx)
        _write_matrix(lines, "bwd_wh", model.backward_cell.wh)
        _write_vector(lines, "bwd_bias", model.backward_cell.bias)
        _write_vector(lines, "out_w", model.output_weights)
    lines.append("end")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Reading


class _Reader:
    def __init__(self, path: Path):
        self.path = path
        self.lines = path.read_text(encoding="utf-8").splitlines()
        self.pos = 0

    def error(self, message: str) -> DatasetError:
        return DatasetError(f"{self.path}: line {self.pos}: {message}")

    def next_line(self) -> str:
        if self.pos >= len(self.lines):
            raise DatasetError(f"{self.path}: unexpected end of checkpoint")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None


def _parse_floats(reader: _Reader, count: int) -> np.ndarray:
    parts = reader.next_line().split(" ")
    if len(parts) != count:
        raise reader.error(f"expected {count} numbers, got {len(parts)}")
    try:
        return np.array(parts, dtype=np.float64)
    except ValueError:
        raise reader.error("non-numeric value") from None


def _read_sections(reader: _Reader) -> tuple[dict, dict, dict, list[DecisionTreeModel] | None]:
    """Parse field/vector/matrix/tree sections until `end`."""
    fields: dict[str, str] = {}
    vectors: dict[str, np.ndarray] = {}
    matrices: dict[str, np.ndarray] = {}
    trees: dict[int, tuple] = {}
    while True:
        line = reader.next_line()
        if line == "end":
            break
        parts = line.split(" ")
        try:
            if parts[0] == "field" and len(parts) == 3:
                fields[parts[1]] = parts[2]
            elif parts[0] == "vector" and len(parts) == 3:
                vectors[parts[1]] = _parse_floats(reader, int(parts[2]))
            elif parts[0] == "matrix" and len(parts) == 4:
                rows, cols = int(parts[2]), int(parts[3])
                matrices[parts[1]] = np.stack([_parse_floats(reader, cols) for _ in range(rows)])
            elif parts[0] == "tree" and len(parts) == 3:
                n_nodes = int(parts[2])
                feature, left, right, value = [], [], [], []
                for _ in range(n_nodes):
                    node = reader.next_line().split(" ")
                    if len(node) != 4:
                        raise reader.error("tree node line must have 4 columns")
                    feature.append(int(node[0]))
                    left.append(int(node[1]))
                    right.append(int(node[2]))
                    value.append(float(node[3]))
                trees[int(parts[1])] = (
                    np.array(feature, dtype=np.int64),
                    np.array(left, dtype=np.int64),
                    np.array(right, dtype=np.int64),
                    np.array(value, dtype=np.float64),
                )
            else:
                raise reader.error(f"unrecognized section line {line!r}")
        except DatasetError:
            raise
        except ValueError as exc:
            raise reader.error(f"malformed section: {exc}") from None
    ordered = [trees[i] for i in sorted(trees)] if trees else None
    return fields, vectors, matrices, ordered


def _tree_from_arrays(arrays, n_features: int, max_depth, min_samples_split) -> DecisionTreeModel:
    feature, left, right, value = arrays
    return DecisionTreeModel(
        feature=feature,
        left=left,
        right=right,
        value=value,
        n_features=n_features,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
    )


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"checkpoint file not found: {path}")
    reader = _Reader(path)
    if reader.next_line() != MAGIC:
        raise DatasetError(f"{path}: not a checkpoint file (missing '{MAGIC}' header)")
    model_line = reader.next_line()
    if not model_line.startswith("model="):
        raise reader.error("expected model=<kind>")
    kind = model_line[len("model="):]
    rep_line = reader.next_line()
    if not rep_line.startswith("representation="):
        raise reader.error("expected representation=<name>")
    representation = rep_line[len("representation="):]
    if representation not in REPRESENTATIONS:
        raise reader.error(f"unknown representation {representation!r}")

    metadata: dict[str, str] = {}
    while reader.peek() is not None and reader.peek().startswith("meta "):
        parts = reader.next_line().split(" ", 2)
        if len(parts) != 3:
            raise reader.error("meta line must be 'meta <key> <value>'")
        metadata[parts[1]] = parts[2]

    vocabulary = None
    if reader.peek() is not None and reader.peek().startswith("vocab "):
        try:
            count = int(reader.next_line().split(" ")[1])
            word_to_index: dict[str, int] = {}
            for _ in range(count):
                entry = reader.next_line().split("\t")
                if len(entry) != 2:
                    raise reader.error("vocabulary line must be word<TAB>index")
                word_to_index[entry[0]] = int(entry[1])
        except DatasetError:
            raise
        except ValueError:
            raise reader.error("malformed vocabulary section") from None
        if sorted(word_to_index.values()) != list(range(count)):
            raise reader.error("vocabulary indices are not a contiguous bijection")
        vocabulary = Vocabulary(word_to_index=word_to_index, min_frequency=1)

    fields, vectors, matrices, trees = _read_sections(reader)

    def field_value(name: str) -> str:
        if name not in fields:
            raise DatasetError(f"{path}: missing field {name!r}")
        return fields[name]

    def int_field(name: str) -> int:
        return int(field_value(name))

    def float_field(name: str) -> float:
        return float(field_value(name))

    def depth_field() -> int | None:
        raw = fields.get("max_depth", "none")
        return None if raw == "none" else int(raw)

    # Inside this block every ValueError means a structurally inconsistent
    # file (corrupt scalar, wrong array shape), so it surfaces as DatasetError.
    try:
        if kind == "decision_tree":
            if not trees or len(trees) != 1:
                raise DatasetError(
                    f"{path}: decision_tree checkpoint must hold exactly one tree"
                )
            model = _tree_from_arrays(
                trees[0], int_field("n_features"), depth_field(), int_field("min_samples_split")
            )
        elif kind == "random_forest":
            n_trees = int_field("n_trees")
            if not trees or len(trees) != n_trees:
                raise DatasetError(f"{path}: expected {n_trees} trees")
            built = tuple(
                _tree_from_arrays(
                    t, int_field("n_features"), depth_field(), int_field("min_samples_split")
                )
                for t in trees
            )
            model = RandomForestModel(
                trees=built,
                n_trees=n_trees,
                features_per_split=int_field("features_per_split"),
                seed=int_field("seed"),
                bootstrap=bool(int_field("bootstrap")),
            )
        elif kind == "logistic_regression":
            if "weights" not in vectors:
                raise DatasetError(f"{path}: missing weights vector")
            model = LogisticRegressionModel(
                weights=vectors["weights"],
                bias=float_field("bias"),
                l2_lambda=float_field("l2_lambda"),
            )
        elif kind == "softmax":
            if "Z" not in matrices:
                raise DatasetError(f"{path}: missing Z matrix")
            model = SoftmaxClassifier(Z=matrices["Z"])
        elif kind == "bilstm":
            needed_m = ("fwd_wx", "fwd_wh", "bwd_wx", "bwd_wh")
            needed_v = ("fwd_bias", "bwd_bias", "out_w")
            if any(n not in matrices for n in needed_m) or any(
                n not in vectors for n in needed_v
            ):
                raise DatasetError(f"{path}: incomplete bilstm parameter sections")
            model = BiLstmClassifier(
                forward_cell=LstmCellParams(
                    wx=matrices["fwd_wx"], wh=matrices["fwd_wh"], bias=vectors["fwd_bias"]
                ),
                backward_cell=LstmCellParams(
                    wx=matrices["bwd_wx"], wh=matrices["bwd_wh"], bias=vectors["bwd_bias"]
                ),
                output_weights=vectors["out_w"],
                output_bias=float_field("output_bias"),
                hidden_size=int_field("hidden_size"),
                max_sequence_length=int_field("max_sequence_length"),
            )
        else:
            raise DatasetError(f"{path}: unknown model kind {kind!r}")
    except DatasetError:
        raise
    except ValueError as exc:
        raise DatasetError(f"{path}: malformed checkpoint: {exc}") from None

    return Checkpoint(
        model_kind=kind,
        model=model,
        representation=representation,
        metadata=metadata,
        vocabulary=vocabulary,
    )
