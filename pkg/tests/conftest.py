import numpy as np
import pytest

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    def record(name, passed, detail=""):
        ACCEPTANCE.append((name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} {name} {detail}")
        return passed
    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
