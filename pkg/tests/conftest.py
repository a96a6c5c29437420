import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_r1_dir() -> pathlib.Path:
    return FIXTURES / "corpus_r1"


@pytest.fixture(scope="session")
def corpus_r2_dir() -> pathlib.Path:
    return FIXTURES / "corpus_r2"
