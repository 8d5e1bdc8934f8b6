import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ranshield import kb
from ranshield.evalkit import FIXTURES_DIR, load_scenarios


@pytest.fixture(scope="session")
def corpus():
    return kb.load_corpus(FIXTURES_DIR / "corpus.json")


@pytest.fixture(scope="session")
def index(corpus):
    return kb.build_index(corpus)


@pytest.fixture(scope="session")
def scenarios():
    return load_scenarios()


@pytest.fixture(scope="session")
def stopwords():
    return kb.load_stopwords()
