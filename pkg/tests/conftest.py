def pytest_terminal_summary(terminalreporter):
    try:
        from tests.test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, title, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2} {status}: {title} ({detail})")
