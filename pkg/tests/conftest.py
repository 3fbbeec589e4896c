import warnings

import numpy as np
import pytest

from mirrorpair import (
    NoiseModel, build_linear_system, fig2_params, steady_state,
)


def make_params(**overrides):
    """PhysicalParams with the g < big_g ordering warning silenced, for
    deliberately degenerate configurations (G = 0 and the like)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return fig2_params(**overrides)


@pytest.fixture(scope="session")
def fig2():
    params = fig2_params()
    sys = build_linear_system(params)
    return params, sys


@pytest.fixture(scope="session")
def fig2_noise(fig2):
    params, _ = fig2
    return NoiseModel.from_params(params)


@pytest.fixture(scope="session")
def decoupled():
    """Two bare mirrors plus idle cavities: g = G = 0."""
    params = make_params(g=0.0, big_g=0.0)
    sys = build_linear_system(params)
    return params, sys


@pytest.fixture(scope="session")
def meters_only():
    """Meters read the mirrors but the entangler is off: G = 0, g > 0."""
    params = make_params(big_g=0.0)
    sys = build_linear_system(params)
    return params, sys
