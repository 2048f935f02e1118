import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyiso import fixtures as fx  # noqa: E402

ALL_SPACES = ["square", "diamond", "hexagon", "octahedron", "cube_bipyramid", "line"]

_criteria = {}


def rand_q(rng: random.Random, lim: int = 20, den: int = 7) -> Fraction:
    return Fraction(rng.randint(-lim, lim), rng.randint(1, den))


def rand_vec(rng: random.Random, dim: int) -> tuple:
    return tuple(rand_q(rng) for _ in range(dim))


@pytest.fixture(params=ALL_SPACES)
def any_space(request):
    return fx.SPACES[request.param]()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_criterion_"):
        _criteria[name] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for key, title in CRITERIA:
        status = _criteria.get(f"test_criterion_{key}")
        mark = "not run" if status is None else ("PASS" if status else "FAIL")
        terminalreporter.write_line(f"criterion {key}: {mark}  {title}")
