import pytest

from xsdmin import codec
from xsdmin.corpus import idmef_pipeline, load_corpus
from xsdmin.schema import SchemaSet

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def pipeline():
    return idmef_pipeline()


@pytest.fixture(scope="session")
def manifest(pipeline):
    return pipeline.manifest


@pytest.fixture(scope="session")
def schema_set(pipeline):
    return SchemaSet([pipeline.schema])


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def corpus_trees(corpus, schema_set):
    return {name: codec.parse_instance(xml, schema_set) for name, xml in corpus}


@pytest.fixture(scope="session")
def heartbeat(corpus_trees):
    return corpus_trees["heartbeat"]


@pytest.fixture
def record_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(label: str, ok: bool, detail: str):
        _ACCEPTANCE.append((label, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
