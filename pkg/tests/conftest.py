def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _LINES.append((props["criterion"], props["title"], report.outcome, props.get("detail", ""),
                       report.duration))


_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail, duration in sorted(_LINES):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {number:>2}: {title} ({duration:.2f} s) {detail}".rstrip())
