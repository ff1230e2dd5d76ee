def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for no in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[no])
