import numpy as np
import pytest

from ball_dirichlet import Potential, RadialGrid


@pytest.fixture(scope="session")
def grid():
    return RadialGrid()


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


BUILTIN = {
    "zero": Potential.zero(),
    "constant": Potential.constant(-10.0),
    "coulomb": Potential.coulomb(1.0),
    "power": Potential.power(1.0, -1.5),
}


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion and print it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        return passed

    return report


_ACCEPTANCE = pytest.StashKey()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
