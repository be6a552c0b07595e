import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from bispectral.darboux import build_plane, complete_pair
from bispectral.examples import example_conditions

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def cached_pair(name: str):
    return complete_pair(build_plane(example_conditions(name)))


@pytest.fixture
def pair_of():
    return cached_pair


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
