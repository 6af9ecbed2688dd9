import numpy as np
import pytest

from pseudotherm.models import TwoLevelParams, two_level


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def toy():
    """``(params, H, eta)`` at a=1, b=2, eps=0.1."""
    p = TwoLevelParams(1.0, 2.0, 0.1)
    H, eta = two_level(p)
    return p, H, eta
