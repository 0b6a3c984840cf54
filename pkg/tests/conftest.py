import numpy as np
import pytest

from routecast.arch import make_floorplan
from routecast.netlist import SyntheticParams, generate_synthetic


@pytest.fixture(scope="session")
def fp8():
    """The default 8x8 part, W_cap=16."""
    return make_floorplan()


@pytest.fixture(scope="session")
def fp_small():
    """4x4 part without hard-block columns; fast for routing tests."""
    return make_floorplan(cols=4, rows=4, mem_col=None, mult_col=None)


@pytest.fixture(scope="session")
def net40(fp8):
    """Medium synthetic design that fits the default part."""
    return generate_synthetic(
        SyntheticParams(n_clb=40, n_inpad=6, n_outpad=6, n_mem=2, n_mult=2), seed=7
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
