import json
from pathlib import Path

import pytest

from qiraa.corpus import parse_annotated
from qiraa.lexicon import load_connectors, load_lexicon

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dataset():
    return parse_annotated(FIXTURES.joinpath("golden.conllu").read_bytes())


@pytest.fixture(scope="session")
def golden_lexicon():
    return load_lexicon(FIXTURES.joinpath("lexicon.tsv").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def golden_connectors():
    return load_connectors(
        FIXTURES.joinpath("connectors_simple.txt").read_text(encoding="utf-8"),
        FIXTURES.joinpath("connectors_complex.txt").read_text(encoding="utf-8"),
    )


@pytest.fixture(scope="session")
def golden_expected():
    return json.loads(FIXTURES.joinpath("golden_features.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def lexicon_rows():
    rows = []
    for line in FIXTURES.joinpath("lexicon.tsv").read_text(encoding="utf-8").splitlines():
        if line.strip():
            lemma, level, _source = line.split("\t")
            rows.append((lemma, level))
    return rows


@pytest.fixture(scope="session")
def connector_lemmas():
    simple = [x.strip() for x in
              FIXTURES.joinpath("connectors_simple.txt").read_text(encoding="utf-8").splitlines()
              if x.strip()]
    cplx = [x.strip() for x in
            FIXTURES.joinpath("connectors_complex.txt").read_text(encoding="utf-8").splitlines()
            if x.strip()]
    return simple, cplx
