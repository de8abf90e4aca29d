import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("ci")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # Keep analyze-report caching away from the real home directory.
    monkeypatch.setenv("ERGORANK_CACHE_DIR", str(tmp_path / "ergorank-cache"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
