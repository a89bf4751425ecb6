import os

import numpy as np
import pytest
import yaml

from PEVSiter.demand import DemandConfig, Trip, generate_trips
from PEVSiter.evaluation import EvalParams
from PEVSiter.network import generate_grid_network, load_network
from PEVSiter.preprocessing import process_demand_options

from .utils import gen_random_walk_trip

# load test data files and set them up as fixtures
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="package")
def six_node():
    # Residential {1, 2}, commercial {4, 5}, other {3, 6}.
    return load_network(os.path.join(DATA_DIR, "six_node.json"))


@pytest.fixture(scope="package")
def demand_options():
    with open(os.path.join(DATA_DIR, "demand_config.yaml")) as fin:
        return yaml.safe_load(fin)


@pytest.fixture(scope="package")
def golden_trips(six_node, demand_options):
    cfg = DemandConfig.from_options(process_demand_options(demand_options))
    return generate_trips(six_node, cfg)


@pytest.fixture(scope="package")
def params():
    return EvalParams(alpha=1.0, beta=2.0, rate=1.0)


@pytest.fixture
def detour_trip():
    # Route 6 -> 4 -> 2 with 1.5 SOC: short of energy at node 4.
    return Trip(5, 1, (5, 3, 1), 1.5, 2.0)


@pytest.fixture(scope="package")
def random_trips(six_node):
    rng = np.random.default_rng(42)
    return [gen_random_walk_trip(six_node, rng) for _ in range(50)]


@pytest.fixture(scope="package", params=[(3, 4), (5, 5)])
def grid_network(request):
    rows, cols = request.param
    return generate_grid_network(rows, cols, spacing=1.0, jitter=0.5, seed=3)
