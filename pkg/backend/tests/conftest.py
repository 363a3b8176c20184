"""Offline test fixtures: a tiny randomly initialized BERT saved to disk.

Keeps the suite runnable with no network and no GPU; the model is
structurally a real BERT (masked-LM head, WordPiece tokenizer) scaled to
toy dimensions.
"""

import os

import pytest

os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")
os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

VOCAB_WORDS = [
    "the", "to", "of", "a", "and", "in", "is", "for", "10", "25", "100",
    "deaths", "died", "cases", "confirmed", "reported", "county",
    "hospital", "update", "tested", "positive", "recovered", "stay",
    "home", "good", "vibes", "coffee", "brunch", "movie", "lol", "covid",
    "news", "today", "people", "rising", "climbing", "safe", "everyone",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    import torch
    from transformers import BertConfig, BertForMaskedLM, BertTokenizerFast
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + VOCAB_WORDS
    tokenizer = BertTokenizerFast(
        vocab={tok: i for i, tok in enumerate(vocab)}, do_lower_case=True
    )
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=80,
    )
    torch.manual_seed(0)
    model = BertForMaskedLM(config)
    out = tmp_path_factory.mktemp("tiny-model")
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return str(out)


TRAIN_EXAMPLES = [
    {"id": "t1", "text": "10 deaths reported in the county", "label": "INFORMATIVE"},
    {"id": "t2", "text": "hospital update 25 cases confirmed", "label": "INFORMATIVE"},
    {"id": "t3", "text": "100 tested positive today", "label": "INFORMATIVE"},
    {"id": "t4", "text": "county reported 10 died", "label": "INFORMATIVE"},
    {"id": "t5", "text": "good vibes and coffee", "label": "UNINFORMATIVE"},
    {"id": "t6", "text": "movie night lol", "label": "UNINFORMATIVE"},
    {"id": "t7", "text": "stay home stay safe everyone", "label": "UNINFORMATIVE"},
    {"id": "t8", "text": "brunch today was good", "label": "UNINFORMATIVE"},
]

DEV_EXAMPLES = [
    {"id": "d1", "text": "25 deaths confirmed in hospital", "label": "INFORMATIVE"},
    {"id": "d2", "text": "coffee and a movie lol", "label": "UNINFORMATIVE"},
]


@pytest.fixture
def train_examples():
    return [dict(ex) for ex in TRAIN_EXAMPLES]


@pytest.fixture
def dev_examples():
    return [dict(ex) for ex in DEV_EXAMPLES]
