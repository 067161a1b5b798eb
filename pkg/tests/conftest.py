import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_response(rng, n, tied: bool):
    """Continuous or heavily tied response vector."""
    if tied:
        return np.round(rng.normal(size=n), 1)
    return rng.normal(size=n)


def random_covariates(rng, n, p, tied: bool):
    if tied:
        return rng.integers(0, 4, size=(n, p)).astype(float)
    return rng.normal(size=(n, p))
