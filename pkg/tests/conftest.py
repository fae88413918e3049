import numpy as np
import pytest

from dampedjc.model import ModelParams, SpectralDensity


def make(kind, coupling, omega_0, omega_c=1.0):
    return ModelParams(omega_0, SpectralDensity(kind, coupling, omega_c))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
