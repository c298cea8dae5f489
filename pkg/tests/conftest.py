import math

import pytest
from hypothesis import HealthCheck, settings

from diskwidths.domains import Domain

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs the full sampling budget (several seconds)")


@pytest.fixture
def disk():
    return Domain.disk()


@pytest.fixture
def near_ellipse():
    return Domain.ellipse(1.02, 0.98)


SQRT2 = math.sqrt(2.0)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Call verdict(n, ok, detail): prints a PASS/FAIL line and fails the test when ok is false."""
    log = request.config.stash.setdefault(_VERDICTS, [])

    def record(n: int, ok: bool, detail: str):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        log.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines):
            terminalreporter.write_line(line)
