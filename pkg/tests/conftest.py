import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from qfridge.src.liouvillian import assemble_block_liouvillian, spectral_decompose
from qfridge.src.model import RefrigeratorParams, thermal_product_state

BASE = RefrigeratorParams()


def random_params(rng: np.random.Generator) -> RefrigeratorParams:
    E0, E1 = rng.uniform(0.3, 1.5, 2)
    return RefrigeratorParams(
        E0=float(E0),
        E1=float(E1),
        g=float(rng.uniform(0.01, 0.5) * min(E0, E1)),
        Tc=float(rng.uniform(0.5, 5)),
        Th=float(rng.uniform(0.5, 5)),
        Tw=float(rng.uniform(0.5, 5)),
        kappa_c=float(10 ** rng.uniform(-5, -3)),
        kappa_h=float(10 ** rng.uniform(-5, -3)),
        kappa_w=float(10 ** rng.uniform(-5, -3)),
        cutoff=float(10 ** rng.uniform(1, 4)),
    )


def random_density(rng: np.random.Generator, dim: int = 6) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def assert_same_multiset(a, b, atol: float):
    a, b = np.asarray(a), np.asarray(b)
    assert a.shape == b.shape
    rows, cols = linear_sum_assignment(np.abs(a[:, None] - b[None, :]))
    np.testing.assert_allclose(a[rows], b[cols], rtol=0, atol=atol)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def base_params():
    return BASE


@pytest.fixture
def no_cold():
    return BASE.replace(kappa_c=0.0)


@pytest.fixture
def base_blocks(base_params):
    return assemble_block_liouvillian(base_params)


@pytest.fixture
def base_spec(base_blocks):
    return spectral_decompose(base_blocks)


@pytest.fixture
def base_thermal(base_params):
    return thermal_product_state(base_params)


@pytest.fixture(params=range(50), ids=lambda i: f"draw{i}")
def drawn_params(request):
    return random_params(np.random.default_rng([7, request.param]))
