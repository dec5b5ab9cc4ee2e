"""Corpus loading, preprocessing, statistics, and stratified splitting."""

import csv
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tweetgauge import corpus
from tweetgauge.errors import DatasetError


def make_tokenized(token_lists, labels):
    return [
        corpus.TokenizedTweet(id=str(i), tokens=tuple(toks), label=lab)
        for i, (toks, lab) in enumerate(zip(token_lists, labels))
    ]


# ---------------------------------------------------------------------------
# Preprocessing


def test_preprocess_golden_hashtag_url_example():
    text = (
        "#RockyFire Update => California Hwy. 20 closed in both directions "
        "due to Lake County fire - #CAfire #wildfires"
    )
    assert corpus.preprocess(text) == [
        "rockyfire", "update", "california", "hwy", "20", "closed",
        "directions", "due", "lake", "county", "fire", "cafire", "wildfires",
    ]


def test_preprocess_golden_mention_example():
    text = (
        "@TheAtlantic That or they might be killed in an airplane accident "
        "in the night a car wreck!"
    )
    assert corpus.preprocess(text) == [
        "theatlantic", "might", "killed", "airplane", "accident", "night", "car", "wreck",
    ]


def test_preprocess_empty_string():
    assert corpus.preprocess("") == []


def test_preprocess_keeps_numbers_and_splits_urls():
    tokens = corpus.preprocess("Flood at https://t.co/abc123 20 homes lost")
    assert "20" in tokens
    # "t" is a stopword and is dropped; the other URL fragments survive.
    assert {"https", "co", "abc123"} <= set(tokens)
    assert "t" not in tokens


def test_preprocess_is_total_on_unicode():
    assert corpus.preprocess("ümläut — café \U0001f525") == ["ml", "ut", "caf"]


def test_stopword_list_has_179_words():
    assert len(corpus.default_stopwords()) == 179


@given(st.text(max_size=200))
@settings(max_examples=300, deadline=None)
def test_preprocess_output_is_clean(text):
    stopwords = corpus.default_stopwords()
    for token in corpus.preprocess(text):
        assert token
        assert token == token.lower()
        assert token not in stopwords
        assert all(c.isascii() and (c.isdigit() or c.islower()) for c in token)


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_preprocess_idempotent_on_joined_output(text):
    once = corpus.preprocess(text)
    again = corpus.preprocess(" ".join(once))
    assert once == again


# ---------------------------------------------------------------------------
# Dataset loading


def write_rows(path, rows, labeled=True):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["id", "keyword", "location", "text"] + (["target"] if labeled else [])
        writer.writerow(header)
        writer.writerows(rows)
    return path


def test_load_dataset_quoted_fields_preserved(tmp_path):
    rows = [
        ["1", "", "", "plain text", "0"],
        ["2", "", "", 'with, comma and "quotes"', "1"],
        ["3", "", "", "line\nbreak inside", "0"],
    ]
    path = write_rows(tmp_path / "t.csv", rows)
    tweets = corpus.load_dataset(path, has_labels=True)
    assert len(tweets) == 3
    assert tweets[1].raw_text == 'with, comma and "quotes"'
    assert tweets[2].raw_text == "line\nbreak inside"
    assert [t.label for t in tweets] == [0, 1, 0]
    assert [t.id for t in tweets] == ["1", "2", "3"]


def test_load_dataset_header_only_is_empty(tmp_path):
    path = write_rows(tmp_path / "t.csv", [])
    assert corpus.load_dataset(path, has_labels=True) == []


def test_load_dataset_unlabeled_header(tmp_path):
    path = write_rows(tmp_path / "t.csv", [["9", "", "", "hello world"]], labeled=False)
    tweets = corpus.load_dataset(path, has_labels=False)
    assert tweets[0].label is None


def test_load_dataset_missing_file():
    with pytest.raises(DatasetError, match="not found"):
        corpus.load_dataset("/nonexistent/nowhere.csv", has_labels=True)


def test_load_dataset_bad_label_reports_row_number(tmp_path):
    path = write_rows(tmp_path / "t.csv", [["1", "", "", "ok", "1"], ["2", "", "", "bad", "7"]])
    with pytest.raises(DatasetError, match="row 2"):
        corpus.load_dataset(path, has_labels=True)


def test_load_dataset_duplicate_id(tmp_path):
    path = write_rows(tmp_path / "t.csv", [["1", "", "", "a", "1"], ["1", "", "", "b", "0"]])
    with pytest.raises(DatasetError, match="duplicate"):
        corpus.load_dataset(path, has_labels=True)


def test_load_dataset_malformed_row_reports_row_number(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("id,keyword,location,text,target\n1,x,y\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="row 1"):
        corpus.load_dataset(path, has_labels=True)


def test_load_dataset_rejects_wrong_header(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("tweet_id,body\n1,hello\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="header"):
        corpus.load_dataset(path, has_labels=True)


# ---------------------------------------------------------------------------
# Statistics


def test_compute_stats_singleton():
    stats = corpus.compute_stats(make_tokenized([["a", "b"]], [1]))
    assert stats.total_tweets == 1
    assert stats.total_positive == 1
    assert stats.unique_words == 2
    assert stats.mean_length == 2.0
    assert stats.median_length == 2
    assert stats.max_length == 2 and stats.min_length == 2


def test_compute_stats_four_tweet_fixture_brute_force():
    token_lists = [
        ["fire", "fire", "water"],
        ["water"],
        ["calm", "water", "fire", "sun"],
        ["sun", "calm"],
    ]
    labels = [1, 0, 1, 0]
    stats = corpus.compute_stats(make_tokenized(token_lists, labels))

    # Independent counting oracle.
    lengths = sorted(len(t) for t in token_lists)
    occurrences = Counter(tok for toks in token_lists for tok in toks)
    assert stats.total_tweets == 4
    assert stats.total_positive == 2
    assert stats.unique_words == len(occurrences)
    assert stats.unique_words_min_freq_2 == sum(1 for c in occurrences.values() if c >= 2)
    assert stats.mean_length == sum(lengths) / 4
    assert stats.median_length == lengths[(4 - 1) // 2]  # lower middle
    assert stats.max_length == max(lengths)
    assert stats.min_length == min(lengths)
    hist_total = sum(p + n for p, n in stats.length_histogram_by_label.values())
    assert hist_total == stats.total_tweets
    assert stats.length_histogram_by_label[3] == (1, 0)
    # Per-label top words: frequency desc, ties lexicographic.
    assert stats.top_words_by_label[1][0] == ("fire", 3)
    assert stats.top_words_by_label[0] == [("calm", 1), ("sun", 1), ("water", 1)]


def test_compute_stats_median_lower_middle_for_even_counts():
    stats = corpus.compute_stats(
        make_tokenized([["a"], ["a", "b"], ["a", "b", "c"], ["a", "b", "c", "d"]], [0, 1, 0, 1])
    )
    assert stats.median_length == 2


def test_compute_stats_rejects_empty_and_unlabeled():
    with pytest.raises(ValueError):
        corpus.compute_stats([])
    with pytest.raises(ValueError):
        corpus.compute_stats([corpus.TokenizedTweet(id="1", tokens=("a",), label=None)])


def test_write_stats_report_files(tmp_path):
    stats = corpus.compute_stats(
        make_tokenized([["fire", "now"], ["sun"]], [1, 0])
    )
    written = corpus.write_stats_report(stats, tmp_path / "out")
    names = sorted(p.name for p in written)
    assert names == [
        "length_histogram.csv",
        "stats_summary.csv",
        "top_words_negative.csv",
        "top_words_positive.csv",
    ]
    summary = (tmp_path / "out" / "stats_summary.csv").read_text().splitlines()
    assert summary[0] == "metric,value"
    assert "total_tweets,2" in summary


# ---------------------------------------------------------------------------
# Stratified splitting


def test_split_sizes_for_large_corpus_fraction_0_01():
    labels = [1] * 3271 + [0] * (7613 - 3271)
    items = make_tokenized([["x"]] * 7613, labels)
    train, val = corpus.split_train_validation(items, 0.01, seed=7)
    assert len(val) == 76  # floor(0.01 * 7613)
    assert len(train) == 7537
    # Positive ratio within one item of proportional: floor/ceil of 76*3271/7613.
    val_pos = sum(t.label for t in val)
    assert val_pos in (32, 33)


def test_split_two_items_one_per_label():
    items = make_tokenized([["a"], ["b"]], [0, 1])
    train, val = corpus.split_train_validation(items, 0.5, seed=0)
    assert len(train) == 1 and len(val) == 1
    assert train[0].label != val[0].label


def test_split_deterministic_for_same_seed():
    items = make_tokenized([["w"]] * 40, [i % 2 for i in range(40)])
    first = corpus.split_train_validation(items, 0.25, seed=3)
    second = corpus.split_train_validation(items, 0.25, seed=3)
    assert [t.id for t in first[0]] == [t.id for t in second[0]]
    assert [t.id for t in first[1]] == [t.id for t in second[1]]


def test_split_different_seeds_differ():
    items = make_tokenized([["w"]] * 100, [i % 2 for i in range(100)])
    val_ids = {
        seed: tuple(t.id for t in corpus.split_train_validation(items, 0.2, seed)[1])
        for seed in range(6)
    }
    assert len(set(val_ids.values())) > 1


def test_split_rejects_bad_fraction_and_small_corpus():
    items = make_tokenized([["a"], ["b"]], [0, 1])
    with pytest.raises(ValueError):
        corpus.split_train_validation(items, 0.0, seed=0)
    with pytest.raises(ValueError):
        corpus.split_train_validation(items, 1.0, seed=0)
    with pytest.raises(ValueError):
        corpus.split_train_validation(items[:1], 0.5, seed=0)


@given(
    labels=st.lists(st.integers(0, 1), min_size=4, max_size=120).filter(
        lambda ls: 0 in ls and 1 in ls
    ),
    fraction=st.floats(0.1, 0.9),
    seed=st.integers(0, 2**31),
)
@settings(max_examples=150, deadline=None)
def test_split_partition_and_stratification_property(labels, fraction, seed):
    items = make_tokenized([["w"]] * len(labels), labels)
    n = len(labels)
    if int(np.floor(fraction * n)) < 1:
        return
    train, val = corpus.split_train_validation(items, fraction, seed)
    train_ids = {t.id for t in train}
    val_ids = {t.id for t in val}
    assert train_ids.isdisjoint(val_ids)
    assert len(train_ids | val_ids) == n
    assert len(val) == int(np.floor(fraction * n))
    # Each part's class counts are within one of exact proportionality.
    n_pos = sum(labels)
    val_pos = sum(t.label for t in val)
    exact = len(val) * n_pos / n
    assert abs(val_pos - exact) <= 1.0
    # Original corpus order is preserved inside each part.
    assert [t.id for t in train] == sorted((t.id for t in train), key=int)
    assert [t.id for t in val] == sorted((t.id for t in val), key=int)
