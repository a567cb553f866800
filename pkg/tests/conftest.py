import sys
from pathlib import Path

import pytest

from newton_hodge.finite_fields import build_field
from newton_hodge.rational_functions import validate

sys.path.insert(0, str(Path(__file__).parent))


def make(p, poles, a=1, constant=0):
    """Shorthand: poles as (location, [a_1, ..., a_d]) with F_p integer entries."""
    return validate(build_field(p, a), poles, constant)


@pytest.fixture
def x2_f3():
    return make(3, [("inf", [0, 1])])


@pytest.fixture
def x2_xinv2():
    return make(3, [("inf", [0, 1]), ([0], [0, 1])])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, label = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {label}")
