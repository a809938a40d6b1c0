"""
Shared pytest configuration.
Settings are read at import time, so the environment is prepared before any
src module is imported.
"""
import os
import sys
import tempfile
from pathlib import Path

_scratch = tempfile.mkdtemp(prefix="graphsmooth-tests-")
os.environ["DATABASE_URL"] = "sqlite://"
os.environ["LOGS_DIR"] = os.path.join(_scratch, "logs")
os.environ["RESULTS_DIR"] = os.path.join(_scratch, "results")
os.environ.setdefault("GRAPHSMOOTH_THREADS", "2")

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run preset-scale sweeps")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: preset-scale sweep, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def store():
    """Result store on the in-memory database, emptied after each test."""
    from src.database.connection import SessionLocal, init_db
    from src.harness.models import TrialRecord
    from src.harness.storage import ResultStore

    init_db()
    yield ResultStore()
    with SessionLocal() as db:
        db.query(TrialRecord).delete()
        db.commit()
