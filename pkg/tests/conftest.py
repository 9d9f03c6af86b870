import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        _CRITERIA[number] = (title, rep.outcome, getattr(item, "_criterion_note", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, note = _CRITERIA[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {number}: {status}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)


@pytest.fixture
def note(request):
    """Attach a short numeric summary to the criterion's report line."""
    def _note(text):
        request.node._criterion_note = text
        print(text)
    return _note
