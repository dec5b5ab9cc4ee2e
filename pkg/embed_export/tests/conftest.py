import csv
from pathlib import Path

import pytest
import torch
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.normalizers import BertNormalizer
from tokenizers.pre_tokenizers import BertPreTokenizer
from tokenizers.processors import TemplateProcessing
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast
from transformers.utils import logging as hf_logging

from embed_export import load_encoder

hf_logging.disable_progress_bar()
hf_logging.set_verbosity_error()

VOCAB_WORDS = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "fire", "flood", "storm", "calm", "sunny",
    "wild", "##fire", "##s", "##d",
    "the", "a", "is", "in", "on", "we", "are", "us",
    "evacuate", "now", "help", "safe", "hill", "city", "bridge",
    "collapse", "park", "picnic", "today", "river", "rising",
    "0", "1", "2", "!", ",", ".", "?",
]

HIDDEN_SIZE = 16
MAX_POSITIONS = 64


def _build_encoder_dir(directory: Path) -> Path:
    vocab = {word: i for i, word in enumerate(VOCAB_WORDS)}
    backend = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    backend.normalizer = BertNormalizer(lowercase=True)
    backend.pre_tokenizer = BertPreTokenizer()
    backend.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B:1 [SEP]:1",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=backend,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        model_max_length=MAX_POSITIONS,
    )
    tokenizer.save_pretrained(directory)

    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(VOCAB_WORDS),
        hidden_size=HIDDEN_SIZE,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=32,
        max_position_embeddings=MAX_POSITIONS,
    )
    BertModel(config).save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def encoder_dir(tmp_path_factory) -> Path:
    return _build_encoder_dir(tmp_path_factory.mktemp("tiny-encoder"))


@pytest.fixture(scope="session")
def encoder(encoder_dir):
    return load_encoder(encoder_dir)


TWEET_ROWS = [
    ("1", "fire", "hill", "Wildfires on the hill, evacuate now!", "1"),
    ("2", "", "", "Sunny picnic in the park today", "0"),
    ("3", "flood", "city", 'The river is rising, we are "safe" now.', "1"),
    ("4", "", "", "", "0"),
    ("5", "storm", "", "storm flood fire " * 30, "1"),
    ("6", "", "park", "calm today,\nhelp us", "0"),
    ("7", "collapse", "bridge", "Bridge collapsed in the city", "1"),
    ("8", "", "", "a 0 1 2 ?", "0"),
    ("9", "", "", "Café ☔ unrecognized wordies", "0"),
    ("10", "fire", "", "fire fires wildfire wildfires", "1"),
]


def _write_csv(path: Path, rows, labeled: bool) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["id", "keyword", "location", "text"] + (["target"] if labeled else [])
        writer.writerow(header)
        for row in rows:
            writer.writerow(list(row[:4]) + ([row[4]] if labeled else []))
    return path


@pytest.fixture(scope="session")
def tweet_rows():
    return TWEET_ROWS


@pytest.fixture
def make_csv(tmp_path):
    def factory(rows=TWEET_ROWS, labeled=True, name="tweets.csv"):
        return _write_csv(tmp_path / name, rows, labeled)

    return factory


@pytest.fixture
def tweets_csv(make_csv) -> Path:
    return make_csv()
