from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from srpa.automaton import load

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def fixture_pa(name: str):
    return load(FIXTURES / f"{name}.json")


@pytest.fixture
def fixture():
    return fixture_pa
