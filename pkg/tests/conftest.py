"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

import contextlib

import pytest

_OUTCOMES = {}


@pytest.fixture
def criterion():
    """Context manager recording PASS when the block completes and FAIL when it raises."""

    @contextlib.contextmanager
    def record(number, title):
        key = (number, title)
        try:
            yield
        except BaseException as exc:
            _OUTCOMES[key] = ("FAIL", f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
            raise
        _OUTCOMES.setdefault(key, ("PASS", ""))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (status, detail) in sorted(_OUTCOMES.items()):
        line = f"criterion {number}: {status}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
