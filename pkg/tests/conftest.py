import pytest

_CRITERIA: dict[str, tuple[str, bool]] = {}


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; it passes iff the test body completes."""
    names = []

    def register(key, title):
        names.append(key)
        _CRITERIA[key] = (title, False)

    yield register
    failed = getattr(request.node, "rep_call", None)
    for key in names:
        title, _ = _CRITERIA[key]
        _CRITERIA[key] = (title, failed is not None and failed.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split("-")[1])):
        title, ok = _CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {title}")
