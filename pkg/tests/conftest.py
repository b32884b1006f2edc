from functools import lru_cache

import pytest

from soergel.context import Session
from soergel.coxeter import CoxeterSystem


@lru_cache(maxsize=None)
def shared_session(name: str, max_length: int, seed: int = 0) -> Session:
    """Sessions are expensive (braid morphisms are solved once per group), so tests share them."""
    return Session(CoxeterSystem.preset(name), max_length, seed=seed)


@pytest.fixture
def session_for():
    return shared_session


@pytest.fixture(scope="session")
def a2():
    return shared_session("A2", 4)


@pytest.fixture(scope="session")
def b2():
    return shared_session("B2", 5)
