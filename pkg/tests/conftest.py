import time

import pytest
from hypothesis import HealthCheck, settings

from enriques_lattice.graphs import BUILTIN, catalog

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("repo")

ACCEPTANCE: list[tuple[str, str]] = []
RUNTIME_BUDGET = 60.0
_started = time.monotonic()


@pytest.fixture(params=BUILTIN)
def graph(request):
    return catalog(request.param).graph


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, name in ACCEPTANCE:
        terminalreporter.write_line(f"{status:4} {name}")
    elapsed = time.monotonic() - _started
    status = "PASS" if elapsed < RUNTIME_BUDGET else "FAIL"
    terminalreporter.write_line(f"{status:4} runtime: {elapsed:.1f} s, budget {RUNTIME_BUDGET:.0f} s")
