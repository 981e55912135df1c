"""
Shared fixtures: the COMM3 instance, the five-customer reduction example
and factories for random small instances.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import numpy as np
import pytest

from models.instance import Budget, Solution
from utils.config import get_settings
from utils.instance_io import load_instance_file

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def pytest_collection_modifyitems(config, items):
    if get_settings().run_slow:
        return
    skip_slow = pytest.mark.skip(reason="full-scale run; set NRP_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def comm3():
    """Three customers, eight requirements, total cost 51."""
    return load_instance_file(os.path.join(DATA_DIR, "comm3.nrp"))


@pytest.fixture
def comm3_budget():
    return Budget(36)


@pytest.fixture
def five_customer():
    """Five customers, eight requirements, budget 25."""
    return load_instance_file(os.path.join(DATA_DIR, "five_customer.nrp"))


@pytest.fixture
def x1():
    return Solution.from_pairs({(1, 1), (2, 0), (3, 0)})


@pytest.fixture
def x2():
    return Solution.from_pairs({(1, 0), (2, 1), (3, 1)})


@pytest.fixture
def x3():
    return Solution.from_pairs({(1, 1), (2, 1), (3, 0)})


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
