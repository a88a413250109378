import numpy as np
import pytest

from modules.log_setup import configure_logging


@pytest.fixture(autouse=True, scope="session")
def _logging():
    configure_logging("WARNING")


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
