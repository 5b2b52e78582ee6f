import numpy as np
import pytest
from hypothesis import settings

from kmwm.graph import build_six_qubit_fixture

settings.register_profile("kmwm", deadline=None, max_examples=40)
settings.load_profile("kmwm")

# edge ids of the six-qubit example, e_k -> k - 1
E1, E2, E3, E4, E5, E6, E7 = range(7)
V1, V2, V3, V4, VA, VB = range(6)


@pytest.fixture
def fixture():
    return build_six_qubit_fixture()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for c in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[c])
