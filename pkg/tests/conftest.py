import math
import sys

import numpy as np
import pytest
from loguru import logger

from qwdirac.algebra import qubit
from qwdirac.monitoring import monitor
from qwdirac.walk import coin1

SQRT_HALF = math.sqrt(0.5)


@pytest.fixture(autouse=True)
def clean_monitor():
    monitor.reset()
    yield
    monitor.reset()


@pytest.fixture
def restore_logging():
    """Put back a plain stderr sink after a test swapped the loguru sinks"""
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture
def hadamard():
    return coin1(SQRT_HALF, SQRT_HALF)


@pytest.fixture
def up():
    return qubit((1, 0))


@pytest.fixture
def spinor_up():
    return qubit((1, 0, 0, 0))
