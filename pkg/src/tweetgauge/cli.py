"""Command-line harness: corpus -> representation -> model -> metrics.

Subcommands: stats, train, evaluate, predict, export-submission.
Configuration comes from a flat `key = value` file (--config); every key can
be overridden by the same-named flag, and flags win.  Exit codes: 0 success,
1 usage/config error, 2 data error, 3 training divergence.

The environment variable TWEETGAUGE_DATA_DIR provides default locations
(train.csv / test.csv) when no dataset path is given.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import bow, checkpoints, classic, corpus, embeddings, metrics, neural
from .errors import ConfigError, DatasetError, DivergenceError
from .validation import stratified_split_indices

CLASSIC_MODELS = ("decision_tree", "random_forest", "logistic_regression")
NEURAL_MODELS = ("softmax", "bilstm")
MODELS = CLASSIC_MODELS + NEURAL_MODELS
REPRESENTATIONS = ("bow", "static_vectors", "contextual")

# Valid model/representation pairings.  Tree, forest and logistic regression
# consume bag-of-words bits; the softmax head consumes one vector per tweet
# (mean-pooled static vectors or the contextual CLS vector); the bilstm
# consumes per-token vector sequences (static table or contextual token file).
PAIRINGS = {
    "decision_tree": ("bow",),
    "random_forest": ("bow",),
    "logistic_regression": ("bow",),
    "softmax": ("static_vectors", "contextual"),
    "bilstm": ("static_vectors", "contextual"),
}

KNOWN_KEYS = {
    "dataset",
    "test_dataset",
    "representation",
    "model",
    "vectors",
    "contextual_cls",
    "contextual_tokens",
    "out",
    "seed",
    "threshold",
    "split",
    "holdout_fraction",
    "min_frequency",
    "stopwords",
    "max_epochs",
    "batch_size",
    "learning_rate",
    "patience",
    "validation_fraction",
    "n_trees",
    "features_per_split",
    "max_depth",
    "min_samples_split",
    "l2_lambda",
    "epochs",
    "hidden_size",
    "max_sequence_length",
}

DEFAULT_SEED = 13
DEFAULT_THRESHOLD = 0.5
DEFAULT_HOLDOUT_FRACTION = 0.2
DEFAULT_MIN_FREQUENCY = 2
DEFAULT_LEARNING_RATES = {"logistic_regression": 0.1, "softmax": 0.05, "bilstm": 0.01}


# ---------------------------------------------------------------------------
# Configuration plumbing


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat `key = value` config file; # starts a comment line."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg: dict[str, str] = {}
    for line_number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {line_number}: expected key = value")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}: line {line_number}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def serialize_config(cfg: dict[str, str]) -> str:
    return "".join(f"{key} = {cfg[key]}\n" for key in sorted(cfg))


def _merge_settings(args: argparse.Namespace) -> dict[str, str]:
    cfg = load_config_file(args.config) if getattr(args, "config", None) else {}
    for key in KNOWN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = str(value)
    return cfg


def _get_int(cfg: dict, key: str, default: int) -> int:
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {cfg[key]!r}") from None


def _get_float(cfg: dict, key: str, default: float) -> float:
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {cfg[key]!r}") from None


def _get_optional_int(cfg: dict, key: str) -> int | None:
    if key not in cfg or cfg[key] == "none":
        return None
    return _get_int(cfg, key, 0)


def _data_dir_default(name: str) -> Path:
    root = os.environ.get("TWEETGAUGE_DATA_DIR")
    if not root:
        raise ConfigError(
            f"no dataset path given and TWEETGAUGE_DATA_DIR is not set "
            f"(expected to find {name} there)"
        )
    return Path(root) / name


def _resolve_dataset(cfg: dict, key: str, default_name: str) -> Path:
    if key in cfg:
        return Path(cfg[key])
    return _data_dir_default(default_name)


def _stopwords(cfg: dict) -> frozenset[str]:
    if "stopwords" in cfg:
        return corpus.load_stopwords(cfg["stopwords"])
    return corpus.default_stopwords()


def _sniff_labels(path: Path) -> bool:
    """True when the CSV header carries the label column."""
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    return bool(header) and header[-1] == "target"


# ---------------------------------------------------------------------------
# Feature construction shared by train / evaluate / predict


def _checkpoint_representation(model_kind: str, representation: str) -> str:
    if representation != "contextual":
        return representation
    return "contextual_tokens" if model_kind == "bilstm" else "contextual_cls"


def _validate_pairing(model_kind: str, representation: str) -> None:
    if model_kind not in MODELS:
        raise ConfigError(f"unknown model {model_kind!r}; choose one of {', '.join(MODELS)}")
    family = "contextual" if representation.startswith("contextual") else representation
    if family not in REPRESENTATIONS:
        raise ConfigError(
            f"unknown representation {representation!r}; choose one of "
            f"{', '.join(REPRESENTATIONS)}"
        )
    if family not in PAIRINGS[model_kind]:
        raise ConfigError(
            f"model {model_kind!r} cannot consume representation {representation!r}; "
            f"valid pairings: {model_kind} <- {', '.join(PAIRINGS[model_kind])}"
        )


def _build_inputs(
    model_kind: str,
    representation: str,
    tokenized: list[corpus.TokenizedTweet],
    cfg: dict,
    vocabulary: bow.Vocabulary | None = None,
):
    """Return the model-ready features for the tweets, as (features, dim)."""
    if representation == "bow":
        if vocabulary is None:
            raise DatasetError("bag-of-words features need a vocabulary")
        X = np.stack([bow.vectorize(t.tokens, vocabulary) for t in tokenized])
        return X, len(vocabulary)
    if representation == "static_vectors":
        if "vectors" not in cfg:
            raise ConfigError("static_vectors representation needs --vectors <file>")
        table = embeddings.load_word_vectors(cfg["vectors"])
        if model_kind == "bilstm":
            seqs = [embeddings.token_vectors(t.tokens, table) for t in tokenized]
            return seqs, table.dimension
        V = np.stack([embeddings.mean_pool(t.tokens, table).vector for t in tokenized])
        return V, table.dimension
    # contextual
    if "contextual_cls" not in cfg:
        raise ConfigError("contextual representation needs --contextual-cls <file>")
    tokens_path = cfg.get("contextual_tokens")
    if model_kind == "bilstm" and tokens_path is None:
        raise ConfigError("bilstm over contextual embeddings needs --contextual-tokens <file>")
    store = embeddings.load_contextual_store(cfg["contextual_cls"], tokens_path)
    try:
        if model_kind == "bilstm":
            seqs = [store.token_sequence(t.id) for t in tokenized]
            return seqs, store.dimension
        V = np.stack([store.cls_vector(t.id) for t in tokenized])
        return V, store.dimension
    except KeyError as exc:
        raise DatasetError(f"contextual store is missing a tweet: {exc.args[0]}") from None


def _model_scores(model_kind: str, model, features) -> np.ndarray:
    if model_kind in CLASSIC_MODELS:
        scores = classic.predict_scores(model, features)
        if model_kind in ("decision_tree", "random_forest"):
            # Leaf fractions can be exactly 0/1; keep ranks sane for AUC.
            scores = classic.clamp_scores(scores)
        return scores
    return model.scores(features)


def _labels_array(tokenized) -> np.ndarray:
    return np.array([t.label for t in tokenized], dtype=np.int64)


def _select_split(
    tokenized: list[corpus.TokenizedTweet], split: str, fraction: float, seed: int
) -> list[corpus.TokenizedTweet]:
    if split == "all":
        return tokenized
    if split not in ("train", "heldout"):
        raise ConfigError(f"unknown split {split!r}; choose train, heldout, or all")
    labels = _labels_array(tokenized)
    train_idx, heldout_idx = stratified_split_indices(labels, fraction, seed)
    take = train_idx if split == "train" else heldout_idx
    return [tokenized[i] for i in take]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _merge_settings(args)
    dataset = Path(args.dataset) if args.dataset else _resolve_dataset(cfg, "dataset", "train.csv")
    out_dir = Path(cfg.get("out", "tweetgauge_out"))
    tweets = corpus.load_dataset(dataset, has_labels=True)
    tokenized = corpus.tokenize_corpus(tweets, _stopwords(cfg))
    stats = corpus.compute_stats(tokenized)
    written = corpus.write_stats_report(stats, out_dir)
    print(f"total_tweets={stats.total_tweets}")
    print(f"total_positive={stats.total_positive}")
    print(f"unique_words={stats.unique_words}")
    print(f"unique_words_min_freq_2={stats.unique_words_min_freq_2}")
    print(f"mean_length={stats.mean_length!r}")
    print(f"median_length={stats.median_length!r}")
    print(f"max_length={stats.max_length}")
    print(f"min_length={stats.min_length}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _train_config(cfg: dict, model_kind: str, seed: int) -> neural.TrainConfig:
    loss = neural.LOSS_BINARY if model_kind == "bilstm" else neural.LOSS_CATEGORICAL
    try:
        return neural.TrainConfig(
            max_epochs=_get_int(cfg, "max_epochs", 100),
            batch_size=_get_int(cfg, "batch_size", 32),
            learning_rate=_get_float(cfg, "learning_rate", DEFAULT_LEARNING_RATES[model_kind]),
            patience=_get_int(cfg, "patience", 10),
            validation_fraction=_get_float(cfg, "validation_fraction", 0.01),
            seed=seed,
            loss=loss,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _merge_settings(args)
    if "model" not in cfg:
        raise ConfigError("train needs --model (or a model key in the config file)")
    model_kind = cfg["model"]
    representation = cfg.get("representation", "bow" if model_kind in CLASSIC_MODELS else None)
    if representation is None:
        raise ConfigError("train needs --representation for this model")
    _validate_pairing(model_kind, representation)

    dataset = Path(args.dataset) if args.dataset else _resolve_dataset(cfg, "dataset", "train.csv")
    seed = _get_int(cfg, "seed", DEFAULT_SEED)
    threshold = _get_float(cfg, "threshold", DEFAULT_THRESHOLD)
    holdout_fraction = _get_float(cfg, "holdout_fraction", DEFAULT_HOLDOUT_FRACTION)
    split = cfg.get("split", "train")
    if split not in ("train", "all"):
        raise ConfigError("train --split must be 'train' (holdout complement) or 'all'")
    out_dir = Path(cfg.get("out", "tweetgauge_out"))

    tweets = corpus.load_dataset(dataset, has_labels=True)
    tokenized = corpus.tokenize_corpus(tweets, _stopwords(cfg))
    training = _select_split(tokenized, split, holdout_fraction, seed)
    y = _labels_array(training)

    vocabulary = None
    if representation == "bow":
        vocabulary = bow.build_vocabulary(
            training, min_frequency=_get_int(cfg, "min_frequency", DEFAULT_MIN_FREQUENCY)
        )
    features, dim = _build_inputs(model_kind, representation, training, cfg, vocabulary)

    report = None
    if model_kind == "decision_tree":
        model = classic.train_decision_tree(
            features,
            y,
            max_depth=_get_optional_int(cfg, "max_depth"),
            min_samples_split=_get_int(cfg, "min_samples_split", 2),
        )
    elif model_kind == "random_forest":
        model = classic.train_random_forest(
            features,
            y,
            n_trees=_get_int(cfg, "n_trees", 100),
            features_per_split=_get_optional_int(cfg, "features_per_split"),
            seed=seed,
            max_depth=_get_optional_int(cfg, "max_depth"),
            min_samples_split=_get_int(cfg, "min_samples_split", 2),
        )
    elif model_kind == "logistic_regression":
        l2 = None if cfg.get("l2_lambda", "none") == "none" else _get_float(cfg, "l2_lambda", 0.0)
        model = classic.train_logistic_regression(
            features,
            y,
            learning_rate=_get_float(cfg, "learning_rate", DEFAULT_LEARNING_RATES[model_kind]),
            epochs=_get_int(cfg, "epochs", 300),
            l2_lambda=l2,
            seed=seed,
        )
    elif model_kind == "softmax":
        model, report = neural.train_softmax(features, y, _train_config(cfg, model_kind, seed))
    else:  # bilstm
        model, report = neural.train_bilstm(
            features,
            y,
            _train_config(cfg, model_kind, seed),
            hidden_size=_get_int(cfg, "hidden_size", 128),
            max_sequence_length=_get_int(cfg, "max_sequence_length", 32),
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt_representation = _checkpoint_representation(model_kind, representation)
    metadata = {
        "seed": str(seed),
        "trained_on": split,
        "holdout_fraction": repr(holdout_fraction),
        "input_dim": str(dim),
    }
    ckpt_path = out_dir / "checkpoint.txt"
    checkpoints.save_checkpoint(
        ckpt_path,
        model,
        representation=ckpt_representation,
        metadata=metadata,
        vocabulary=vocabulary,
    )

    scores = _model_scores(model_kind, model, features)
    train_report = metrics.compute_report(scores, y, threshold)
    metrics_path = out_dir / "train_metrics.csv"
    row = metrics.report_csv_row(model_kind, ckpt_representation, "train", train_report)
    metrics_path.write_text("model,embedding,split,auc,f1,acc\n" + row + "\n", encoding="utf-8")

    print(f"wrote {ckpt_path}")
    print(f"wrote {metrics_path}")
    if report is not None:
        report_path = out_dir / "train_report.csv"
        report_path.write_text(report.to_csv(), encoding="utf-8")
        print(f"wrote {report_path}")
        print(
            f"epochs_run={report.epochs_run} best_epoch={report.best_epoch} "
            f"stopped_early={report.stopped_early}"
        )
    print(row)
    return 0


def _load_checkpoint_for(cfg: dict, path: str) -> checkpoints.Checkpoint:
    ckpt = checkpoints.load_checkpoint(path)
    wanted = cfg.get("representation")
    if wanted is not None:
        if _checkpoint_representation(ckpt.model_kind, wanted) != ckpt.representation:
            raise ConfigError(
                f"checkpoint {path} was trained on representation "
                f"{ckpt.representation!r}, not {wanted!r}"
            )
    return ckpt


def _features_for_checkpoint(
    ckpt: checkpoints.Checkpoint, tokenized: list[corpus.TokenizedTweet], cfg: dict
):
    rep = ckpt.representation
    if rep == "bow":
        if ckpt.vocabulary is None:
            raise DatasetError("checkpoint carries no vocabulary for bag-of-words features")
        features, dim = _build_inputs(ckpt.model_kind, "bow", tokenized, cfg, ckpt.vocabulary)
    elif rep == "static_vectors":
        features, dim = _build_inputs(ckpt.model_kind, "static_vectors", tokenized, cfg)
    else:
        features, dim = _build_inputs(ckpt.model_kind, "contextual", tokenized, cfg)
    expected = ckpt.metadata.get("input_dim")
    if expected is not None and int(expected) != dim:
        raise ConfigError(
            f"checkpoint expects {expected}-dimensional inputs but the supplied "
            f"representation yields {dim}"
        )
    return features


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _merge_settings(args)
    ckpt = _load_checkpoint_for(cfg, args.checkpoint)
    dataset = Path(args.dataset) if args.dataset else _resolve_dataset(cfg, "dataset", "train.csv")
    split = cfg.get("split", "heldout")
    seed = _get_int(cfg, "seed", int(ckpt.metadata.get("seed", DEFAULT_SEED)))
    fraction = _get_float(
        cfg, "holdout_fraction", float(ckpt.metadata.get("holdout_fraction", DEFAULT_HOLDOUT_FRACTION))
    )
    threshold = _get_float(cfg, "threshold", DEFAULT_THRESHOLD)
    out_dir = Path(cfg.get("out", Path(args.checkpoint).parent))

    tweets = corpus.load_dataset(dataset, has_labels=True)
    tokenized = corpus.tokenize_corpus(tweets, _stopwords(cfg))
    part = _select_split(tokenized, split, fraction, seed)
    y = _labels_array(part)
    features = _features_for_checkpoint(ckpt, part, cfg)
    scores = _model_scores(ckpt.model_kind, ckpt.model, features)
    report = metrics.compute_report(scores, y, threshold)

    row = metrics.report_csv_row(ckpt.model_kind, ckpt.representation, split, report)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.csv"
    metrics_path.write_text("model,embedding,split,auc,f1,acc\n" + row + "\n", encoding="utf-8")
    print(f"wrote {metrics_path}")
    print("model,embedding,split,auc,f1,acc")
    print(row)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _merge_settings(args)
    dataset = Path(args.dataset)
    has_labels = _sniff_labels(dataset)
    tweets = corpus.load_dataset(dataset, has_labels=has_labels)
    tokenized = corpus.tokenize_corpus(tweets, _stopwords(cfg))
    threshold = _get_float(cfg, "threshold", DEFAULT_THRESHOLD)
    out_dir = Path(cfg.get("out", Path(args.checkpoints[0]).parent))

    columns: list[tuple[str, np.ndarray]] = []
    for i, ckpt_path in enumerate(args.checkpoints, 1):
        ckpt = _load_checkpoint_for(cfg, ckpt_path)
        features = _features_for_checkpoint(ckpt, tokenized, cfg)
        scores = _model_scores(ckpt.model_kind, ckpt.model, features)
        name = f"{ckpt.model_kind}_{ckpt.representation}"
        print(f"model_{i} = {name} ({ckpt_path})")
        columns.append((f"model_{i}", scores))

    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "predictions.csv"
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["id", "text"]
        if has_labels:
            header.append("target")
        for name, _ in columns:
            header.extend([f"{name}_score", f"{name}_label"])
        writer.writerow(header)
        for row_index, tweet in enumerate(tweets):
            row = [tweet.id, tweet.raw_text]
            if has_labels:
                row.append(tweet.label)
            for _, scores in columns:
                score = float(scores[row_index])
                row.extend([repr(score), int(score >= threshold)])
            writer.writerow(row)
    print(f"wrote {out_path}")
    return 0


def cmd_export_submission(args: argparse.Namespace) -> int:
    cfg = _merge_settings(args)
    ckpt = _load_checkpoint_for(cfg, args.checkpoint)
    dataset = (
        Path(args.dataset) if args.dataset else _resolve_dataset(cfg, "test_dataset", "test.csv")
    )
    has_labels = _sniff_labels(dataset)
    threshold = _get_float(cfg, "threshold", DEFAULT_THRESHOLD)
    out_dir = Path(cfg.get("out", Path(args.checkpoint).parent))

    tweets = corpus.load_dataset(dataset, has_labels=has_labels)
    tokenized = corpus.tokenize_corpus(tweets, _stopwords(cfg))
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "submission.csv"
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "target"])
        if tweets:
            features = _features_for_checkpoint(ckpt, tokenized, cfg)
            scores = _model_scores(ckpt.model_kind, ckpt.model, features)
            for tweet, score in zip(tweets, scores):
                writer.writerow([tweet.id, int(score >= threshold)])
    print(f"wrote {out_path}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise ConfigError(message)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help=f"rng seed (default {DEFAULT_SEED})")
    p.add_argument("--out", help="output directory")
    p.add_argument("--stopwords", help="override the bundled stop-word list")


def _add_representation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--representation", choices=REPRESENTATIONS)
    p.add_argument("--vectors", help="word-vector text file (static_vectors)")
    p.add_argument("--contextual-cls", dest="contextual_cls", help="contextual CLS export file")
    p.add_argument(
        "--contextual-tokens", dest="contextual_tokens", help="contextual token export file"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tweetgauge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics tables")
    p.add_argument("dataset", nargs="?", help="labeled tweet CSV")
    _add_common_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train a model and write a checkpoint")
    p.add_argument("dataset", nargs="?", help="labeled tweet CSV")
    _add_common_flags(p)
    _add_representation_flags(p)
    p.add_argument("--model", choices=MODELS)
    p.add_argument(
        "--split",
        choices=["train", "all"],
        help="train on the holdout complement (train, default) or the whole file (all)",
    )
    p.add_argument("--threshold", type=float, help="decision threshold (score >= t is positive)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint on a dataset split")
    p.add_argument("checkpoint")
    p.add_argument("dataset", nargs="?", help="labeled tweet CSV")
    _add_common_flags(p)
    _add_representation_flags(p)
    p.add_argument("--split", choices=["train", "heldout", "all"])
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="per-tweet predictions from one or two checkpoints")
    p.add_argument("dataset", help="tweet CSV (labeled or not)")
    p.add_argument("checkpoints", nargs="+", help="one or two checkpoint files")
    _add_common_flags(p)
    _add_representation_flags(p)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("export-submission", help="write id,target predictions for a test CSV")
    p.add_argument("checkpoint")
    p.add_argument("dataset", nargs="?", help="test CSV (defaults to $TWEETGAUGE_DATA_DIR/test.csv)")
    _add_common_flags(p)
    _add_representation_flags(p)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_export_submission)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) == "predict" and len(args.checkpoints) > 2:
            raise ConfigError("predict takes at most two checkpoints")
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DatasetError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
