import numpy as np
import pytest

from lovaszdist.capacity import Capacity

WORKED_VALUES = {
    (1,): 0.1,
    (2,): 0.6,
    (3,): 0.9,
    (1, 2): 0.9,
    (1, 3): 0.9,
    (2, 3): 0.9,
    (1, 2, 3): 1.0,
}

WORKED_JSON = """{
  "n": 3,
  "values": {"1": 0.1, "2": 0.6, "3": 0.9, "1,2": 0.9, "1,3": 0.9, "2,3": 0.9, "1,2,3": 1}
}"""

_criteria = []


@pytest.fixture
def worked_capacity():
    return Capacity.from_mapping(3, WORKED_VALUES)


@pytest.fixture
def worked_file(tmp_path):
    path = tmp_path / "worked.json"
    path.write_text(WORKED_JSON)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""
    def record(number, title, passed, detail=""):
        _criteria.append((number, title, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_criteria, key=lambda c: c[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}  {detail}")
