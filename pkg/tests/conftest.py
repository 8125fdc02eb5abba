import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    num, title = crit
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[num] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        verdict, title = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {title}")


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test: ``criterion(3, "title")``."""

    def tag(num: int, title: str) -> None:
        record_property("criterion", (num, title))

    return tag
