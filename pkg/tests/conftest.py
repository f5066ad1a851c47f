from pathlib import Path

import pytest

from levigauge import load_domain

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
CORPUS = ["ball", "bis_2_3", "bis_2_2_2", "bis_2_3_4", "c4"]


def corpus_path(name: str) -> Path:
    return CORPUS_DIR / f"{name}.json"


@pytest.fixture(scope="session")
def corpus():
    return {name: load_domain(corpus_path(name)) for name in CORPUS}


@pytest.fixture(scope="session")
def c4(corpus):
    return corpus["c4"]


@pytest.fixture(scope="session")
def ball(corpus):
    return corpus["ball"]


@pytest.fixture(scope="session")
def bis23(corpus):
    return corpus["bis_2_3"]


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, detail: str, seconds: float | None = None):
        timing = "" if seconds is None else f" [{seconds:.2f}s]"
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}{timing} {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
