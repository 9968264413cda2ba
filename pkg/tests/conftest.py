import numpy as np
import pytest

from drnv.model import make_instance


@pytest.fixture
def single_sample():
    """n=1, x1=0, delta=0.5, mu=1, sigma=1, c1=c2=1 (the spec's hand-evaluable instance)."""
    return make_instance([0.0], 0.5, 1.0, 1.0, mu=1.0, sigma=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
