import numpy as np
import pytest

from writhekit.curves import make_circle, make_torus_knot, reparameterize_constant


@pytest.fixture(scope="session")
def circle512():
    return make_circle(1.0, 512)


@pytest.fixture(scope="session")
def trefoil1024():
    return make_torus_knot(2, 3, 2.0, 1.0, 1024)


@pytest.fixture(scope="session")
def trefoil_rep(trefoil1024):
    # reparameterized constant on the default interval, shared read-only
    rep, interval = reparameterize_constant(trefoil1024)
    return rep, interval


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
