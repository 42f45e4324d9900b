import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from amsos.data import Dataset  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def iris_path():
    return DATA_DIR / "iris.csv"


@pytest.fixture
def two_blobs():
    """Two tight, well separated blobs of 20 points each."""
    rng = np.random.default_rng(7)
    a = rng.normal((0, 0), 0.3, size=(20, 2))
    b = rng.normal((10, 10), 0.3, size=(20, 2))
    return Dataset(np.vstack([a, b]), np.repeat([0, 1], 20), "two_blobs")


@pytest.fixture
def random_dataset():
    def make(seed, m=40, n=2, classes=3):
        rng = np.random.default_rng(seed)
        labels = np.arange(m) % classes
        return Dataset(rng.normal(size=(m, n)) * 3, labels, f"random{seed}")

    return make


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
