ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    """Re-emit the acceptance checklist; per-test stdout is captured, so the
    one-line-per-criterion report lives here."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
