import numpy as np
import pytest
from hypothesis import settings

from liyau import make_model_manifold

# numerical property tests want reproducible example streams
settings.register_profile("numeric", derandomize=True, deadline=None)
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def circle():
    return make_model_manifold("circle")


@pytest.fixture(scope="session")
def interval():
    return make_model_manifold("interval-neumann")


@pytest.fixture(scope="session")
def half_line():
    return make_model_manifold("half-line-neumann")


@pytest.fixture(scope="session")
def sphere2():
    return make_model_manifold("sphere-radial", m=2)


@pytest.fixture(scope="session")
def hyperbolic2():
    return make_model_manifold("hyperbolic-radial", m=2)


@pytest.fixture(scope="session")
def line():
    return make_model_manifold("euclidean-line")


def simpson(f, a, b, n=4096):
    """Composite Simpson rule; the tests' independent quadrature oracle."""
    if n % 2:
        n += 1
    x = np.linspace(a, b, n + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum())
