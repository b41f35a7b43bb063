import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spdckit.dispersion import synthetic_table  # noqa: E402
from spdckit.phasematch import SpdcConfig  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def table():
    return synthetic_table()


@pytest.fixture(scope="session")
def degenerate_config():
    return SpdcConfig.degenerate(405.0, "y")


@pytest.fixture
def data_dir():
    return DATA
