import numpy as np
import pytest

from hinet.embedding import EmbeddingTable


def random_table(n_words: int, dim: int, seed: int) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    return EmbeddingTable.from_tokens([f"w{i}" for i in range(n_words)], rng.normal(size=(n_words, dim)))


@pytest.fixture(scope="session")
def small_table():
    return EmbeddingTable.from_tokens(
        ["a", "b", "c", "d"],
        np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 0.0], [0.0, 1.0]]),
    )


# --- acceptance report ----------------------------------------------------------

_criteria: dict[int, list] = {}
_notes: dict[int, list[str]] = {}


@pytest.fixture
def note(request):
    """Attach a report line to the test's acceptance criterion."""
    number = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _notes.setdefault(number, []).append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _criteria.setdefault(number, [title, "PASS"])
    if report.failed:
        entry[1] = "FAIL"
    elif report.skipped and entry[1] == "PASS":
        entry[1] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcome = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {outcome}  {title}")
        for text in _notes.get(number, []):
            terminalreporter.write_line(f"              {text}")
