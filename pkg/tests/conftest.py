import sys

import pytest

from hankel_inverse import validate_interlacing


@pytest.fixture
def one_by_one():
    return validate_interlacing([1.0], [0.5])


@pytest.fixture
def full_mass():
    return validate_interlacing([1.0], [0.0], "finite")


@pytest.fixture
def two_by_two():
    return validate_interlacing([1.0, 0.5], [0.7, 0.3])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
