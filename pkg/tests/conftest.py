import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lexkit.corpus import load_corpus
from lexkit.lexical import Tokenizer
from lexkit.scores import load_srl

DATA = Path(__file__).parent / "data" / "synthetic"


@pytest.fixture(scope="session")
def synthetic_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def synthetic_corpus():
    return load_corpus(DATA, "canonical-jsonl")


@pytest.fixture(scope="session")
def srl_annotations():
    return load_srl(DATA / "srl.jsonl")


@pytest.fixture()
def word_tokenizer():
    return Tokenizer(mode="word")
