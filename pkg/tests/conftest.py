"""Shared fixtures: shipped packs and an API client factory."""

from __future__ import annotations

import pytest

from lingotutor import default_packs_dir
from lingotutor.pack import load_packs


@pytest.fixture(scope="session")
def packs():
    """All shipped language packs keyed by language code."""
    return load_packs(default_packs_dir())


@pytest.fixture(scope="session")
def fi_pack(packs):
    """Finnish starter pack."""
    return packs["fi"]


@pytest.fixture(scope="session")
def ru_pack(packs):
    """Russian starter pack."""
    return packs["ru"]


@pytest.fixture(scope="session")
def de_pack(packs):
    """German starter pack."""
    return packs["de"]


@pytest.fixture
def make_client(tmp_path):
    """Factory building API test clients over a fresh data directory."""
    from fastapi.testclient import TestClient

    from lingotutor.service import create_app

    made = []

    def build(data_dir=None):
        client = TestClient(create_app(data_dir=data_dir or tmp_path / "data"))
        made.append(client)
        return client

    yield build
    for client in made:
        client.close()
