from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.register_profile("stress", parent=settings.get_profile("repo"), max_examples=2000)
settings.load_profile("repo")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def intro_source() -> str:
    return (DATA / "intro.svr").read_text(encoding="utf-8")
