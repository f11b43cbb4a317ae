"""Shared pytest plumbing: one PASS/FAIL line per acceptance criterion."""

import re

import pytest

CRITERIA = {}  # number -> (title, detail)
_OUTCOMES = {}


@pytest.fixture
def criterion(request):
    """Record ``(title, detail)`` for the summary line of an acceptance test."""
    num = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
    box = {"title": request.node.name, "detail": ""}
    yield box
    CRITERIA[num] = (box["title"], box["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = re.search(r"criterion_(\d+)", item.name)
    if m and rep.when == "call":
        _OUTCOMES[int(m.group(1))] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_OUTCOMES):
        title, detail = CRITERIA.get(num, ("", ""))
        verdict = "PASS" if _OUTCOMES[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict}  {title}  {detail}".rstrip())
