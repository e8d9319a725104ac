import math

import numpy as np
import pytest

from qfridge.src.dynamics import qubit_temperature
from qfridge.src.model import (
    DIM,
    ENERGY_BASIS,
    DensityMatrix,
    RefrigeratorParams,
    analytic_eigenvalues,
    bose_occupation,
    build_eigenbasis,
    build_hamiltonian,
    build_jump_operators,
    decay_rate,
    gibbs_state,
    ohmic_spectral_density,
    product_index,
    thermal_product_state,
    virtual_temperature,
)
from qfridge.src.types import (
    Basis,
    BasisMismatchError,
    Bath,
    DegeneracyError,
    DegenerateTemperatureError,
    DensityMatrixError,
    FrequencyDomainError,
    ParameterDomainError,
)

from .conftest import random_params


@pytest.mark.parametrize(
    ("changes", "bound"),
    [
        ({"E0": 0.0}, "E0 > 0"),
        ({"E1": -1.0}, "E1 > 0"),
        ({"g": 0.7}, "g < min"),
        ({"g": -1e-3}, "0 <= g"),
        ({"Th": 0.0}, "Th > 0"),
        ({"kappa_w": -1e-4}, "kappa_w >= 0"),
        ({"cutoff": 0.0}, "cutoff > 0"),
        ({"Tc": math.nan}, "Tc must be finite"),
    ],
)
def test_params_name_the_violated_bound(changes, bound):
    with pytest.raises(ParameterDomainError, match=bound):
        RefrigeratorParams(**changes)


def test_hamiltonian_spectrum(base_params):
    np.testing.assert_allclose(
        np.sort(np.linalg.eigvalsh(build_hamiltonian(base_params))),
        np.sort([0, 1.0, 1.699, 0.7, 1.701, 2.4]),
        atol=1e-12,
    )


def test_zero_coupling_is_degenerate(base_params):
    energies = np.linalg.eigvalsh(build_hamiltonian(base_params.replace(g=0.0)))
    assert np.count_nonzero(np.isclose(energies, base_params.E2, atol=1e-12)) == 2
    with pytest.raises(DegeneracyError):
        build_eigenbasis(base_params.replace(g=0.0))


def test_top_level_ignores_g(base_params):
    assert analytic_eigenvalues(base_params.replace(g=0.5)).max() == pytest.approx(2.4)


def test_eigenbasis(base_params):
    basis = build_eigenbasis(base_params)
    b = basis.basis_matrix
    np.testing.assert_allclose(b @ b.T, np.eye(DIM), atol=1e-12)
    np.testing.assert_allclose(
        basis.to_energy(build_hamiltonian(base_params)), np.diag(basis.eigenvalues), atol=1e-12
    )
    row = ENERGY_BASIS[2]
    assert np.count_nonzero(row) == 2
    assert row[product_index(1, 1)] == pytest.approx(1 / math.sqrt(2))
    assert row[product_index(0, 2)] == pytest.approx(-1 / math.sqrt(2))


def test_eigenbasis_for_drawn_parameters():
    rng = np.random.default_rng(5)
    for _ in range(100):
        params = random_params(rng)
        basis = build_eigenbasis(params)
        np.testing.assert_allclose(
            basis.to_energy(build_hamiltonian(params)),
            np.diag(analytic_eigenvalues(params)),
            atol=1e-12,
        )


def test_spectral_density():
    assert ohmic_spectral_density(0.0, 3.0, 10.0) == 0
    assert ohmic_spectral_density(1.0, 1.0, 1e6) == pytest.approx(1, abs=1e-6)
    assert ohmic_spectral_density(-2.0, 0.5, 1.0) == pytest.approx(0.135335, abs=1e-6)


def test_decay_rate():
    assert bose_occupation(1.0, 1.0) == pytest.approx(0.581977, abs=1e-6)
    ratio = decay_rate(1.0, 1.0, 0.3, 50.0) / decay_rate(-1.0, 1.0, 0.3, 50.0)
    assert ratio == pytest.approx(math.exp(-1), rel=1e-12)
    assert decay_rate(0.4, 2.0, 0.0, 10.0) == 0
    with pytest.raises(FrequencyDomainError):
        decay_rate(0.0, 1.0, 1.0, 1.0)


def test_jump_operators(base_params):
    basis = build_eigenbasis(base_params)
    h = basis.hamiltonian
    jumps = build_jump_operators(base_params, basis)
    assert all(j.rate >= 0 for j in jumps)
    for j in jumps:
        np.testing.assert_allclose(h @ j.matrix - j.matrix @ h, j.omega * j.matrix, atol=1e-12)
    cold = [j for j in jumps if j.bath is Bath.COLD and j.is_emission]
    # |1><4| in one-based energy labels
    assert any(j.matrix[0, 3] != 0 and j.gap == pytest.approx(base_params.E0) for j in cold)
    hot = [j for j in jumps if j.bath is Bath.HOT and j.is_emission]
    hot_gap = base_params.E1 - base_params.g
    assert any(j.matrix[3, 2] != 0 and j.gap == pytest.approx(hot_gap) for j in hot)
    for em, ab in zip(jumps[::2], jumps[1::2], strict=True):
        assert em.is_emission and not ab.is_emission
        np.testing.assert_array_equal(ab.matrix, em.matrix.conj().T)


def test_drawn_jump_operators(drawn_params):
    basis = build_eigenbasis(drawn_params)
    h = basis.hamiltonian
    jumps = build_jump_operators(drawn_params, basis)
    for j in jumps:
        np.testing.assert_allclose(h @ j.matrix - j.matrix @ h, j.omega * j.matrix, atol=1e-10)
    for em, ab in zip(jumps[::2], jumps[1::2], strict=True):
        assert em.bath is ab.bath and em.gap == ab.gap
        ratio = ab.rate / em.rate
        assert ratio == pytest.approx(math.exp(-em.gap / drawn_params.temperature(em.bath)))


def test_thermal_product_state(base_params):
    rho = thermal_product_state(base_params)
    assert rho.basis is Basis.PRODUCT
    np.testing.assert_array_equal(rho.matrix, np.diag(np.diag(rho.matrix)))
    assert np.trace(rho.matrix).real == pytest.approx(1, abs=1e-15)
    q = rho.qubit_marginal().real
    assert q[0, 0] / q[1, 1] == pytest.approx(math.exp(0.7))
    hot = thermal_product_state(base_params.replace(Tc=1e6)).qubit_marginal().real
    np.testing.assert_allclose(hot, np.diag([0.5, 0.5]), atol=1e-6)


def test_basis_change_is_reversible(base_thermal):
    energy = base_thermal.to_energy()
    np.testing.assert_allclose(energy.to_product().matrix, base_thermal.matrix, atol=1e-15)
    np.testing.assert_allclose(
        energy.qubit_marginal(), base_thermal.qubit_marginal(), atol=1e-15
    )
    with pytest.raises(BasisMismatchError):
        energy.require_basis(Basis.PRODUCT)


@pytest.mark.parametrize(
    "matrix",
    [
        np.ones((DIM, DIM)) / DIM + 1e-3j * np.eye(DIM, k=1),
        np.eye(DIM),
        np.diag([2.0, -1, 0, 0, 0, 0]),
    ],
    ids=["non-hermitian", "trace", "negative"],
)
def test_density_validation(matrix):
    with pytest.raises(DensityMatrixError):
        DensityMatrix.checked(matrix, Basis.PRODUCT)


def test_gibbs_state(base_params):
    tau = gibbs_state(base_params, 1.0)
    assert qubit_temperature(tau, base_params.E0).value > 0
    assert np.trace(tau.matrix).real == pytest.approx(1)


@pytest.mark.parametrize(
    ("params", "expected"),
    [
        (RefrigeratorParams(), 0.5122),
        (RefrigeratorParams(E0=1.0, E1=1.0, g=1e-3, Tw=1.0, Th=4.0), 0.571429),
        (RefrigeratorParams(Th=2.0, Tw=2.0), 2.0),
    ],
)
def test_virtual_temperature(params, expected):
    assert virtual_temperature(params) == pytest.approx(expected, abs=5e-5)


def test_virtual_temperature_diverges():
    # E2 / Tw == E1 / Th
    with pytest.raises(DegenerateTemperatureError):
        virtual_temperature(RefrigeratorParams(E0=1.0, E1=1.0, Tw=2.0, Th=1.0))
