"""Shared fixtures for the diffset toolkit tests."""
import logging
from typing import Generator

import numpy as np
import pytest

from app.core.settings import get_settings
from app.zq.ring import RingCtx, build_ctx
from app.zq.sets import SubsetZq


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Rebuild settings and drop CLI log handlers so nothing leaks between tests."""
    for name in ("DIFFSET_JOBS", "DIFFSET_LOG_LEVEL", "DIFFSET_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    logging.getLogger().handlers.clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def z7() -> RingCtx:
    return build_ctx(7)


@pytest.fixture
def z12() -> RingCtx:
    return build_ctx(12)


@pytest.fixture
def z13() -> RingCtx:
    return build_ctx(13)


@pytest.fixture
def make_set():
    """SubsetZq from a modulus and residues: make_set(7, [0, 1, 3])"""

    def factory(q: int, elements) -> SubsetZq:
        return SubsetZq.of(build_ctx(q), elements)

    return factory
