import time
from contextlib import contextmanager

import pytest

_LINES: dict[int, str] = {}


class CriterionRecorder:
    """Records one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def check(self, k: int, title: str, budget: float):
        start = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            if isinstance(exc, pytest.xfail.Exception) or isinstance(exc, AssertionError):
                detail = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            else:
                detail = f"{type(exc).__name__}: {exc}"
            self.record(k, False, title, time.perf_counter() - start, detail)
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < budget
        self.record(k, ok, title, elapsed, "" if ok else f"over the {budget:g} s budget")
        assert ok, f"criterion {k} took {elapsed:.1f} s (budget {budget:g} s)"

    def record(self, k, ok, title, elapsed, detail=""):
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.1f} s)"
        if detail:
            line += f"  [{detail}]"
        _LINES[k] = line


@pytest.fixture
def criterion():
    return CriterionRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
