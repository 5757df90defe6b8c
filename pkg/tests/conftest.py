from __future__ import annotations

import re
from importlib import resources

import pytest

from ocrpc import ngram

_ACCEPTANCE_PATTERN = re.compile(r"test_c(\d+)_(\w+)")
_acceptance_results: dict[int, tuple[str, str]] = {}


def bundled_corpus() -> str:
    return resources.files("ocrpc").joinpath("data/corpus_en.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return bundled_corpus()


@pytest.fixture(scope="session")
def corpus_model(corpus_text: str) -> ngram.NGramModel:
    return ngram.train(corpus_text, order=5)


@pytest.fixture(scope="session")
def toy_model() -> ngram.NGramModel:
    # one paragraph per repetition so the n-grams never wrap around
    return ngram.train("the boy is driving his car\n\n" * 10, order=5)


def pytest_runtest_logreport(report: pytest.TestReport) -> None:
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = _ACCEPTANCE_PATTERN.search(report.nodeid)
    if match:
        number = int(match.group(1))
        label = match.group(2).replace("_", " ")
        _acceptance_results[number] = (label, report.outcome.upper())


def pytest_terminal_summary(terminalreporter) -> None:
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_acceptance_results):
        label, outcome = _acceptance_results[number]
        word = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label}): {word}")
