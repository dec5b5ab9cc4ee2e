"""Command-line interface: subcommands, config handling, exit codes."""

import numpy as np
import pytest

from tweetgauge import cli
from tweetgauge.checkpoints import load_checkpoint

from synthdata import synthetic_rows, write_test_csv, write_train_csv, write_vector_file


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stats_fixture(tmp_path):
    rows = [
        ("1", "", "", "fire fire flood", "1"),
        ("2", "", "", "calm sunny day", "0"),
        ("3", "", "", "flood warning issued", "1"),
        ("4", "", "", "nice day", "0"),
    ]
    return write_train_csv(tmp_path / "train.csv", rows)


# ---------------------------------------------------------------------------
# stats


def test_stats_hand_counted_values(tmp_path, capsys):
    dataset = stats_fixture(tmp_path)
    code, out, _ = run(capsys, "stats", str(dataset), "--out", str(tmp_path / "out"))
    assert code == 0
    # Token lists: [fire fire flood], [calm sunny day], [flood warning issued],
    # [nice day]; 8 distinct words, of which fire/flood/day occur twice.
    assert "total_tweets=4" in out
    assert "total_positive=2" in out
    assert "unique_words=8" in out
    assert "unique_words_min_freq_2=3" in out
    assert "mean_length=2.75" in out
    assert "median_length=3" in out
    assert "max_length=3" in out
    assert "min_length=2" in out
    assert (tmp_path / "out" / "stats_summary.csv").is_file()
    assert (tmp_path / "out" / "length_histogram.csv").is_file()
    assert (tmp_path / "out" / "top_words_positive.csv").is_file()
    assert (tmp_path / "out" / "top_words_negative.csv").is_file()


def test_stats_uses_data_dir_when_no_positional(tmp_path, capsys, monkeypatch):
    write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    monkeypatch.setenv("TWEETGAUGE_DATA_DIR", str(tmp_path))
    code, out, _ = run(capsys, "stats", "--out", str(tmp_path / "out"))
    assert code == 0
    assert "total_tweets=20" in out


def test_stats_without_dataset_or_data_dir_is_config_error(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("TWEETGAUGE_DATA_DIR", raising=False)
    code, _, err = run(capsys, "stats", "--out", str(tmp_path / "out"))
    assert code == 1
    assert "TWEETGAUGE_DATA_DIR" in err


def test_stats_missing_file_is_data_error(tmp_path, capsys):
    code, _, err = run(capsys, "stats", str(tmp_path / "absent.csv"))
    assert code == 2
    assert "data error" in err


# ---------------------------------------------------------------------------
# Config files


def test_config_round_trip_and_unknown_key(tmp_path):
    cfg = {"seed": "7", "model": "decision_tree", "out": "somewhere"}
    path = tmp_path / "run.cfg"
    path.write_text(cli.serialize_config(cfg), encoding="utf-8")
    assert cli.load_config_file(path) == cfg
    bad = tmp_path / "bad.cfg"
    bad.write_text("# comment\nnot_a_known_key = 3\n", encoding="utf-8")
    with pytest.raises(Exception, match="line 2"):
        cli.load_config_file(bad)


def test_flag_overrides_config_value(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    config = tmp_path / "run.cfg"
    config.write_text("seed = 1\nmodel = decision_tree\n", encoding="utf-8")
    out_dir = tmp_path / "out"
    code, _, _ = run(
        capsys, "train", str(dataset),
        "--config", str(config), "--seed", "2", "--out", str(out_dir),
    )
    assert code == 0
    assert load_checkpoint(out_dir / "checkpoint.txt").metadata["seed"] == "2"


def test_malformed_config_line_is_config_error(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(10))
    config = tmp_path / "run.cfg"
    config.write_text("seed 1\n", encoding="utf-8")
    code, _, err = run(capsys, "stats", str(dataset), "--config", str(config))
    assert code == 1
    assert "key = value" in err


# ---------------------------------------------------------------------------
# train / evaluate


def train_bow(capsys, dataset, out_dir, model="decision_tree", *extra):
    code, out, err = run(
        capsys, "train", str(dataset), "--model", model, "--out", str(out_dir), *extra
    )
    assert code == 0, err
    return out


def test_train_writes_checkpoint_and_metrics(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(60))
    out_dir = tmp_path / "out"
    out = train_bow(capsys, dataset, out_dir)
    assert (out_dir / "checkpoint.txt").is_file()
    metrics_lines = (out_dir / "train_metrics.csv").read_text().splitlines()
    assert metrics_lines[0] == "model,embedding,split,auc,f1,acc"
    assert metrics_lines[1].startswith("decision_tree,bow,train,")
    assert "wrote" in out
    ckpt = load_checkpoint(out_dir / "checkpoint.txt")
    assert ckpt.model_kind == "decision_tree"
    assert ckpt.metadata["trained_on"] == "train"
    assert ckpt.vocabulary is not None


def test_train_then_evaluate_train_split_reproduces_metrics(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(80))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir, "random_forest", "--config", make_forest_cfg(tmp_path))
    train_row = (out_dir / "train_metrics.csv").read_text().splitlines()[1]
    eval_dir = tmp_path / "eval"
    code, out, err = run(
        capsys, "evaluate", str(out_dir / "checkpoint.txt"), str(dataset),
        "--split", "train", "--out", str(eval_dir),
    )
    assert code == 0, err
    eval_row = (eval_dir / "metrics.csv").read_text().splitlines()[1]
    # evaluate re-selects the training rows from the checkpoint metadata
    # (seed and holdout fraction), so the numbers agree exactly.
    assert eval_row == train_row


def make_forest_cfg(tmp_path):
    cfg = tmp_path / "forest.cfg"
    cfg.write_text("n_trees = 5\n", encoding="utf-8")
    return str(cfg)


def test_evaluate_heldout_differs_from_train_rows(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(80))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir)
    code, out, _ = run(
        capsys, "evaluate", str(out_dir / "checkpoint.txt"), str(dataset),
        "--split", "heldout", "--out", str(tmp_path / "eval"),
    )
    assert code == 0
    row = (tmp_path / "eval" / "metrics.csv").read_text().splitlines()[1]
    assert row.split(",")[2] == "heldout"


def test_train_split_all_records_whole_file(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir, "decision_tree", "--split", "all")
    ckpt = load_checkpoint(out_dir / "checkpoint.txt")
    assert ckpt.metadata["trained_on"] == "all"


def test_train_is_byte_identical_across_runs(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(60))
    dirs = [tmp_path / "a", tmp_path / "b"]
    for out_dir in dirs:
        train_bow(capsys, dataset, out_dir, "random_forest", "--config", make_forest_cfg(tmp_path))
    assert (dirs[0] / "checkpoint.txt").read_bytes() == (dirs[1] / "checkpoint.txt").read_bytes()
    assert (dirs[0] / "train_metrics.csv").read_bytes() == (dirs[1] / "train_metrics.csv").read_bytes()


def test_train_softmax_over_static_vectors(tmp_path, capsys, corpus_words):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(60))
    vectors = write_vector_file(tmp_path / "vectors.txt", corpus_words)
    config = tmp_path / "neural.cfg"
    config.write_text("max_epochs = 5\nbatch_size = 8\nvalidation_fraction = 0.2\n", encoding="utf-8")
    out_dir = tmp_path / "out"
    code, out, err = run(
        capsys, "train", str(dataset),
        "--model", "softmax", "--representation", "static_vectors",
        "--vectors", str(vectors), "--config", str(config), "--out", str(out_dir),
    )
    assert code == 0, err
    assert (out_dir / "train_report.csv").is_file()
    report_lines = (out_dir / "train_report.csv").read_text().splitlines()
    assert report_lines[0] == "epoch,train_loss,val_loss"
    assert "epochs_run=" in out
    ckpt = load_checkpoint(out_dir / "checkpoint.txt")
    assert ckpt.representation == "static_vectors"
    assert ckpt.model_kind == "softmax"


def test_train_rejects_invalid_pairing(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    code, _, err = run(
        capsys, "train", str(dataset), "--model", "softmax", "--representation", "bow"
    )
    assert code == 1
    assert "cannot consume" in err


def test_train_bilstm_contextual_needs_token_file(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    cls_file = tmp_path / "cls.txt"
    cls_file.write_text("#dim=2\n", encoding="utf-8")
    code, _, err = run(
        capsys, "train", str(dataset),
        "--model", "bilstm", "--representation", "contextual",
        "--contextual-cls", str(cls_file),
    )
    assert code == 1
    assert "contextual-tokens" in err


def test_train_needs_model(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    code, _, err = run(capsys, "train", str(dataset))
    assert code == 1
    assert "--model" in err


@pytest.mark.filterwarnings("ignore:overflow encountered")
def test_train_divergence_exit_code(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    config = tmp_path / "diverge.cfg"
    config.write_text("learning_rate = 1e300\nepochs = 5\n", encoding="utf-8")
    code, _, err = run(
        capsys, "train", str(dataset),
        "--model", "logistic_regression", "--config", str(config),
        "--out", str(tmp_path / "out"),
    )
    assert code == 3
    assert "diverged" in err


def test_evaluate_rejects_representation_mismatch(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir)
    code, _, err = run(
        capsys, "evaluate", str(out_dir / "checkpoint.txt"), str(dataset),
        "--representation", "static_vectors", "--vectors", "unused.txt",
    )
    assert code == 1
    assert "trained on representation" in err


def test_evaluate_missing_checkpoint_is_data_error(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    code, _, err = run(capsys, "evaluate", str(tmp_path / "no.txt"), str(dataset))
    assert code == 2
    assert "not found" in err


# ---------------------------------------------------------------------------
# predict / export-submission


def test_predict_with_two_checkpoints_labeled(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    tree_dir, forest_dir = tmp_path / "tree", tmp_path / "forest"
    train_bow(capsys, dataset, tree_dir)
    train_bow(capsys, dataset, forest_dir, "random_forest", "--config", make_forest_cfg(tmp_path))
    out_dir = tmp_path / "pred"
    code, out, err = run(
        capsys, "predict", str(dataset),
        str(tree_dir / "checkpoint.txt"), str(forest_dir / "checkpoint.txt"),
        "--out", str(out_dir),
    )
    assert code == 0, err
    lines = (out_dir / "predictions.csv").read_text().splitlines()
    assert lines[0] == (
        "id,text,target,model_1_score,model_1_label,model_2_score,model_2_label"
    )
    assert len(lines) == 41
    first = lines[1].split(",")
    assert first[-1] in ("0", "1") and first[-3] in ("0", "1")


def test_predict_unlabeled_has_no_target_column(tmp_path, capsys):
    train = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    test = write_test_csv(tmp_path / "test.csv", synthetic_rows(10))
    out_dir = tmp_path / "out"
    train_bow(capsys, train, out_dir)
    code, _, err = run(
        capsys, "predict", str(test), str(out_dir / "checkpoint.txt"),
        "--out", str(tmp_path / "pred"),
    )
    assert code == 0, err
    lines = (tmp_path / "pred" / "predictions.csv").read_text().splitlines()
    assert lines[0] == "id,text,model_1_score,model_1_label"
    assert len(lines) == 11


def test_predict_rejects_three_checkpoints(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(20))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir)
    ckpt = str(out_dir / "checkpoint.txt")
    code, _, err = run(capsys, "predict", str(dataset), ckpt, ckpt, ckpt)
    assert code == 1
    assert "at most two" in err


def test_predict_threshold_flag_changes_labels(tmp_path, capsys):
    dataset = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    out_dir = tmp_path / "out"
    train_bow(capsys, dataset, out_dir)
    code, _, _ = run(
        capsys, "predict", str(dataset), str(out_dir / "checkpoint.txt"),
        "--threshold", "1.0", "--out", str(tmp_path / "pred"),
    )
    assert code == 0
    lines = (tmp_path / "pred" / "predictions.csv").read_text().splitlines()[1:]
    labels = {line.split(",")[-1] for line in lines}
    # Clamped tree scores stay below 1.0, so every label is forced to 0.
    assert labels == {"0"}


def test_export_submission_row_count_and_empty_file(tmp_path, capsys, monkeypatch):
    train = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    test = write_test_csv(tmp_path / "test.csv", synthetic_rows(10, seed=9))
    out_dir = tmp_path / "out"
    train_bow(capsys, train, out_dir)
    code, _, err = run(
        capsys, "export-submission", str(out_dir / "checkpoint.txt"), str(test),
        "--out", str(tmp_path / "sub"),
    )
    assert code == 0, err
    lines = (tmp_path / "sub" / "submission.csv").read_text().splitlines()
    assert lines[0] == "id,target"
    assert len(lines) == 11
    assert all(line.split(",")[1] in ("0", "1") for line in lines[1:])

    empty = write_test_csv(tmp_path / "empty.csv", [])
    code, _, _ = run(
        capsys, "export-submission", str(out_dir / "checkpoint.txt"), str(empty),
        "--out", str(tmp_path / "sub2"),
    )
    assert code == 0
    # Header only; read_text() normalizes the csv module's \r\n terminator.
    assert (tmp_path / "sub2" / "submission.csv").read_text() == "id,target\n"


def test_export_submission_resolves_test_csv_from_data_dir(tmp_path, capsys, monkeypatch):
    train = write_train_csv(tmp_path / "train.csv", synthetic_rows(40))
    write_test_csv(tmp_path / "test.csv", synthetic_rows(6, seed=2))
    out_dir = tmp_path / "out"
    train_bow(capsys, train, out_dir)
    monkeypatch.setenv("TWEETGAUGE_DATA_DIR", str(tmp_path))
    code, _, err = run(
        capsys, "export-submission", str(out_dir / "checkpoint.txt"),
        "--out", str(tmp_path / "sub"),
    )
    assert code == 0, err
    assert len((tmp_path / "sub" / "submission.csv").read_text().splitlines()) == 7
