import numpy as np
import pytest

from srsurf import MetricField, OneForm

HEISENBERG = "dz + y*dx - x*dy"
CARTAN = "dz + y*dx"
OMEGA_0 = "dz + x*dy"
OMEGA_1 = "dy + x^2*dz"


@pytest.fixture
def heisenberg():
    return OneForm.parse(HEISENBERG)


@pytest.fixture
def cartan():
    return OneForm.parse(CARTAN)


@pytest.fixture
def omega0():
    return OneForm.parse(OMEGA_0)


@pytest.fixture
def omega1():
    return OneForm.parse(OMEGA_1)


@pytest.fixture
def euclid():
    return MetricField.identity()


@pytest.fixture
def rng():
    return np.random.default_rng(7041998)


def box_points(rng, n, scale=2.0):
    return [tuple(rng.uniform(-scale, scale, 3)) for _ in range(n)]


def heis_M(x, y, z):
    return 2.25 * (x * x + y * y) ** 2 / (1 + x * x + y * y) ** 4


def heis_K_printed(x, y, z):
    return (3 * (1 + 2 * x * x + 4 * y * y + 3 * x * x * y * y + 3 * y ** 4)
            / ((1 + y * y) * (1 + x * x + y * y) ** 2))


def cartan_M(x, y, z):
    return 0.25 * (1 - 2 * y * y) ** 2 / (1 + y * y) ** 4


def cartan_K_printed(x, y, z):
    return (1 + 4 * y * y) / (1 + y * y) ** 2
