import numpy as np
import pytest

from spheremls import fibonacci_grid


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240930)


@pytest.fixture(scope="session")
def medium_grid():
    # N = 641 nodes, fill distance around 0.1 rad
    return fibonacci_grid(320)


def random_sphere(rng, m, d=3):
    g = rng.standard_normal((m, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
