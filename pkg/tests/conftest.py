import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, title in mod.TITLES.items():
        checks = mod.RESULTS[number]
        if not checks:
            tr.write_line(f"criterion {number:2d}: NOT RUN  {title}")
            continue
        ok = all(passed for _, passed in checks)
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
        for label, passed in checks:
            if not passed:
                tr.write_line(f"              failed: {label}")
