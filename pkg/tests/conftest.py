import numpy as np
import pytest

from tsrsim import MirrorSpec, as_built_model


@pytest.fixture
def model():
    return as_built_model()


@pytest.fixture
def grid():
    return np.linspace(0.5e6, 15e6, 1001)


@pytest.fixture
def lossless_model():
    return as_built_model(
        end_mirror=MirrorSpec(1.0, 0.0, 0.0),
        internal_loss=0.0,
    )
