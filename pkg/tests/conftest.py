import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in acceptance_log.RESULTS:
        terminalreporter.write_line(line)
    passed = sum(ok for _, ok, _ in acceptance_log.RESULTS)
    terminalreporter.write_line(f"{passed}/{len(acceptance_log.RESULTS)} criteria passed")
