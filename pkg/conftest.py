"""Run the backend test suite from the repository root.

The backend resolves fixture and report paths relative to the working
directory (see backend/pytest.ini, which expects ``backend/`` as cwd).
"""
import os
from pathlib import Path

import pytest

BACKEND_DIR = Path(__file__).resolve().parent / "backend"


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: fixture building and Borcherds runs (deselect with -m \"not slow\")"
    )


@pytest.fixture(scope="session", autouse=True)
def _backend_cwd():
    previous = os.getcwd()
    os.chdir(BACKEND_DIR)
    yield
    os.chdir(previous)
