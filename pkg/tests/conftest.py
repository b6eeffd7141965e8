import numpy as np
import pytest

from netentropy.channel import ChannelParams

# the operating point used throughout the numerical experiments
PAPER_PARAMS = ChannelParams(r0=0.7, eta=2.0, nu=500.0, B=12e6)


@pytest.fixture
def paper_params():
    return PAPER_PARAMS


@pytest.fixture
def rng():
    return np.random.default_rng(20250807)
