import numpy as np
import pytest

from netkonal import boundary_data, build_network, quadratic_eikonal


@pytest.fixture
def unit_edge():
    return build_network(
        vertices=["v0", "v1"],
        edges=[("e", "v0", "v1", 1.0)],
        boundary=["v0", "v1"],
    )


@pytest.fixture
def y_network():
    """Three-armed star: center c, leaves b1, b2, b3, lengths 1, 1, 2."""
    return build_network(
        vertices=["c", "b1", "b2", "b3"],
        edges=[
            ("e1", "c", "b1", 1.0),
            ("e2", "c", "b2", 1.0),
            ("e3", "c", "b3", 2.0),
        ],
        boundary=["b1", "b2", "b3"],
    )


@pytest.fixture
def y_ham(y_network):
    return quadratic_eikonal(y_network, 1.0)


@pytest.fixture
def y_zero_data(y_network):
    return boundary_data(y_network, {"b1": 0.0, "b2": 0.0, "b3": 0.0})


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
