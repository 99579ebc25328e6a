import pytest

from koszulprop.presets import load_preset


@pytest.fixture(scope="session")
def presets():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_preset(name)
        return cache[name]
    return get


def pytest_terminal_summary(terminalreporter):
    from _report import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else ""))
