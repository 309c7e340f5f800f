import pytest

from sofic.fixtures import SMALL_FINITE, load_fixture

# number -> {"title": str, "cases": [(case, passed, detail)]}; filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in SMALL_FINITE}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, rec in sorted(ACCEPTANCE.items()):
        cases = rec["cases"]
        failed = [f"{case}: {detail}" if case else detail for case, ok, detail in cases if not ok]
        line = f"criterion {num:>2} {'FAIL' if failed else 'PASS'}  {rec['title']}"
        if len(cases) > 1:
            line += f" ({len(cases) - len(failed)}/{len(cases)} cases)"
        if failed:
            line += "  [" + "; ".join(failed[:3]) + "]"
        terminalreporter.write_line(line)
