"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_RESULTS: dict[int, tuple[str, str, list[str]]] = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        outcome = "PASS" if report.outcome == "passed" else "FAIL"
        notes = [v for k, v in report.user_properties if k == "note"]
        _RESULTS[props["criterion"]] = (outcome, props["title"], notes)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        outcome, title, notes = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {outcome}  {title}")
        for note in notes:
            terminalreporter.write_line(f"    {note}")
