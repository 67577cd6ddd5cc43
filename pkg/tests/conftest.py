import numpy as np
import pytest

from photonsolve import add_slack, build_program

# two-variable landscape g(x,y) = (x^4+y^4)/4 - 5(x^3+y^3)/3 + 3(x^2+y^2):
# local minima at (0,3), (3,0), (3,3), global minimum 0 at the origin
G_TERMS = [
    ((0, 0, 0, 0), 0.25),
    ((1, 1, 1, 1), 0.25),
    ((0, 0, 0), -5.0 / 3.0),
    ((1, 1, 1), -5.0 / 3.0),
    ((0, 0), 3.0),
    ((1, 1), 3.0),
]


def g_value(x, y):
    return (x**4 + y**4) / 4.0 - 5.0 * (x**3 + y**3) / 3.0 + 3.0 * (x**2 + y**2)


@pytest.fixture
def g_program():
    return build_program(G_TERMS, 2, 100.0)


@pytest.fixture
def g_slack():
    return add_slack(build_program(G_TERMS, 2, 100.0))


def random_program(rng, num_vars=None, max_order=5, R=1.0):
    """Random sparse program for property tests."""
    if num_vars is None:
        num_vars = int(rng.integers(1, 9))
    raw = []
    for _ in range(int(rng.integers(1, 12))):
        order = int(rng.integers(1, max_order + 1))
        idx = tuple(sorted(rng.integers(0, num_vars, size=order)))
        raw.append((idx, float(rng.uniform(-10, 10))))
    return build_program(raw, num_vars, R)


def random_simplex_point(rng, n, R):
    return R * rng.dirichlet(np.ones(n))
