import sys
from pathlib import Path

import pytest

# Add repo directory to path, as main.py does
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import CURVE_DIR, SAMPLE_SEQUENCE_DIR
from src.field_curve import load_curve


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the full-size acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size acceptance run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def tiny():
    return load_curve(CURVE_DIR / "tiny17.curve")


@pytest.fixture(scope="session")
def p256():
    return load_curve(CURVE_DIR / "p256.curve")


@pytest.fixture
def litmus_fasta():
    return SAMPLE_SEQUENCE_DIR / "litmus.fasta"

