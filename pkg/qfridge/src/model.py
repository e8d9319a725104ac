"""Refrigerator Hamiltonian, analytic eigenbasis, bath channels and rates.

Product basis index of ``|a b>`` (qubit ``a``, qutrit ``b``) is ``3a + b``.
Energy basis states are ordered ``|00>, |01>, (|11>-|02>)/sqrt2, |10>,
(|11>+|02>)/sqrt2, |12>``. Units: hbar = k_B = J = 1.
"""

import logging
import math

import numpy as np
from msgspec import Struct, structs

from .types import (
    Basis,
    BasisMismatchError,
    Bath,
    DegeneracyError,
    DegenerateTemperatureError,
    DensityMatrixError,
    FrequencyDomainError,
    ParameterDomainError,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from typing import Any

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

QUBIT_DIM = 2
QUTRIT_DIM = 3
DIM = QUBIT_DIM * QUTRIT_DIM

_R = 1 / math.sqrt(2)

# rows: energy states, columns: product basis |00>,|01>,|02>,|10>,|11>,|12>
ENERGY_BASIS = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, -_R, 0, _R, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, _R, 0, _R, 0],
        [0, 0, 0, 0, 0, 1],
    ],
    dtype=np.float64,
)
ENERGY_BASIS.setflags(write=False)

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
GAP_TOL = 1e-9


def product_index(a: int, b: int) -> int:
    return QUTRIT_DIM * a + b


class RefrigeratorParams(Struct, frozen=True, kw_only=True, forbid_unknown_fields=True):
    E0: float = 0.7
    E1: float = 1.0
    g: float = 1e-3
    Tc: float = 1.0
    Th: float = 3.0
    Tw: float = 1.0
    kappa_c: float = 1e-4
    kappa_h: float = 1e-4
    kappa_w: float = 1e-4
    cutoff: float = 1e3

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("E0", "E1", "g", "Tc", "Th", "Tw", "kappa_c", "kappa_h", "kappa_w", "cutoff"):
            if not math.isfinite(v := getattr(self, name)):
                err = f"{name} must be finite, got {v!r}"
                raise ParameterDomainError(err)
        if self.E0 <= 0:
            err = f"E0 > 0 violated: E0={self.E0}"
            raise ParameterDomainError(err)
        if self.E1 <= 0:
            err = f"E1 > 0 violated: E1={self.E1}"
            raise ParameterDomainError(err)
        if not 0 <= self.g < min(self.E0, self.E1):
            err = f"0 <= g < min(E0, E1) violated: g={self.g}, E0={self.E0}, E1={self.E1}"
            raise ParameterDomainError(err)
        for name in ("Tc", "Th", "Tw"):
            if getattr(self, name) <= 0:
                err = f"{name} > 0 violated: {name}={getattr(self, name)}"
                raise ParameterDomainError(err)
        for name in ("kappa_c", "kappa_h", "kappa_w"):
            if getattr(self, name) < 0:
                err = f"{name} >= 0 violated: {name}={getattr(self, name)}"
                raise ParameterDomainError(err)
        if self.cutoff <= 0:
            err = f"cutoff > 0 violated: cutoff={self.cutoff}"
            raise ParameterDomainError(err)

    @property
    def E2(self) -> float:
        return self.E0 + self.E1

    def temperature(self, bath: Bath) -> float:
        match bath:
            case Bath.COLD:
                return self.Tc
            case Bath.HOT:
                return self.Th
            case Bath.WORK:
                return self.Tw

    def beta(self, bath: Bath) -> float:
        return 1 / self.temperature(bath)

    def kappa(self, bath: Bath) -> float:
        match bath:
            case Bath.COLD:
                return self.kappa_c
            case Bath.HOT:
                return self.kappa_h
            case Bath.WORK:
                return self.kappa_w

    def replace(self, **changes: "Any"):
        """Copy with ``changes`` applied; the copy is validated again."""
        return RefrigeratorParams(**(structs.asdict(self) | changes))


class EnergyEigenbasis(Struct, frozen=True, eq=False):
    eigenvalues: "NDArray[np.float64]"
    basis_matrix: "NDArray[np.float64]"

    def to_energy(self, op: "NDArray[Any]") -> "NDArray[Any]":
        return self.basis_matrix @ op @ self.basis_matrix.T

    def to_product(self, op: "NDArray[Any]") -> "NDArray[Any]":
        return self.basis_matrix.T @ op @ self.basis_matrix

    @property
    def hamiltonian(self) -> "NDArray[np.float64]":
        """H in the basis this object describes (diagonal)."""
        return np.diag(self.eigenvalues)


class JumpOperator(Struct, frozen=True, eq=False):
    """One dissipative channel of a bath in the energy eigenbasis.

    ``omega`` carries the sign of the rate convention: negative for the
    emission operator (lowers the energy by ``|omega|``, rate ``J(n+1)``),
    positive for its absorption partner (the adjoint, rate ``J n``).
    Both satisfy ``[H, A] = omega A``.
    """

    bath: Bath
    omega: float
    matrix: "NDArray[np.complex128]"
    rate: float

    @property
    def gap(self) -> float:
        return abs(self.omega)

    @property
    def is_emission(self) -> bool:
        return self.omega < 0


class DensityMatrix(Struct, frozen=True, eq=False):
    matrix: "NDArray[np.complex128]"
    basis: Basis

    @classmethod
    def checked(cls, matrix: "NDArray[Any]", basis: Basis):
        rho = cls(np.asarray(matrix, dtype=np.complex128), basis)
        rho.validate()
        return rho

    def validate(
        self,
        hermiticity_tol: float = HERMITICITY_TOL,
        trace_tol: float = TRACE_TOL,
        positivity_tol: float = POSITIVITY_TOL,
    ):
        m = self.matrix
        if m.shape != (DIM, DIM):
            err = f"expected a {DIM}x{DIM} matrix, got shape {m.shape}"
            raise DensityMatrixError(err)
        if (drift := np.max(np.abs(m - m.conj().T))) > hermiticity_tol:
            err = f"not Hermitian: max |rho - rho^dag| = {drift:.3e}"
            raise DensityMatrixError(err)
        if abs((tr := np.trace(m)) - 1) > trace_tol:
            err = f"trace is {tr.real:.15g}, expected 1"
            raise DensityMatrixError(err)
        if (low := np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]) < -positivity_tol:
            err = f"not positive semidefinite: min eigenvalue {low:.3e}"
            raise DensityMatrixError(err)
        return self

    def to_energy(self):
        if self.basis is Basis.ENERGY:
            return self
        return DensityMatrix(ENERGY_BASIS @ self.matrix @ ENERGY_BASIS.T, Basis.ENERGY)

    def to_product(self):
        if self.basis is Basis.PRODUCT:
            return self
        return DensityMatrix(ENERGY_BASIS.T @ self.matrix @ ENERGY_BASIS, Basis.PRODUCT)

    def in_basis(self, basis: Basis):
        match basis:
            case Basis.ENERGY:
                return self.to_energy()
            case Basis.PRODUCT:
                return self.to_product()

    def require_basis(self, basis: Basis):
        if self.basis is not basis:
            err = f"expected a {basis.value}-basis state, got {self.basis.value}"
            raise BasisMismatchError(err)
        return self

    def qubit_marginal(self) -> "NDArray[np.complex128]":
        m = self.to_product().matrix.reshape(QUBIT_DIM, QUTRIT_DIM, QUBIT_DIM, QUTRIT_DIM)
        return np.einsum("ajbj->ab", m)

    def qutrit_marginal(self) -> "NDArray[np.complex128]":
        m = self.to_product().matrix.reshape(QUBIT_DIM, QUTRIT_DIM, QUBIT_DIM, QUTRIT_DIM)
        return np.einsum("iaib->ab", m)


def build_hamiltonian(params: RefrigeratorParams) -> "NDArray[np.float64]":
    params.validate()
    h_a = np.diag([0.0, params.E0])
    h_b = np.diag([0.0, params.E1, params.E2])
    h = np.kron(h_a, np.eye(QUTRIT_DIM)) + np.kron(np.eye(QUBIT_DIM), h_b)
    i02, i11 = product_index(0, 2), product_index(1, 1)
    h[i02, i11] = h[i11, i02] = params.g
    return h


def analytic_eigenvalues(params: RefrigeratorParams) -> "NDArray[np.float64]":
    E0, E1, E2, g = params.E0, params.E1, params.E2, params.g
    return np.array([0.0, E1, E2 - g, E0, E2 + g, E0 + E2])


def build_eigenbasis(params: RefrigeratorParams) -> EnergyEigenbasis:
    params.validate()
    if params.g == 0:
        err = "g = 0 makes levels 3 and 5 degenerate; the analytic ordering is undefined"
        raise DegeneracyError(err)
    return EnergyEigenbasis(analytic_eigenvalues(params), ENERGY_BASIS)


def diagonal_eigenbasis(params: RefrigeratorParams) -> EnergyEigenbasis:
    """Product basis as an eigenbasis of the uncoupled (g = 0) Hamiltonian."""
    if params.g != 0:
        err = f"the product basis only diagonalises H at g = 0, got g={params.g}"
        raise ParameterDomainError(err)
    return EnergyEigenbasis(
        np.diag(build_hamiltonian(params)).copy(),
        np.eye(DIM),
    )


def ohmic_spectral_density(omega: float, kappa: float, cutoff: float) -> float:
    if cutoff <= 0:
        err = f"cutoff > 0 violated: cutoff={cutoff}"
        raise ParameterDomainError(err)
    w = abs(omega)
    return kappa * w * math.exp(-w / cutoff)


def bose_occupation(omega: float, temperature: float) -> float:
    x = omega / temperature
    if x > 700:
        return 0.0
    return 1 / math.expm1(x)


def decay_rate(omega: float, bath_temp: float, kappa: float, cutoff: float) -> float:
    if omega == 0:
        err = "no zero-frequency channel exists: omega must be nonzero"
        raise FrequencyDomainError(err)
    if bath_temp <= 0:
        err = f"bath temperature must be positive, got {bath_temp}"
        raise ParameterDomainError(err)
    w = abs(omega)
    n = bose_occupation(w, bath_temp)
    j = ohmic_spectral_density(w, kappa, cutoff)
    if omega > 0:
        return j * n
    return j * (n + 1)


def bare_coupling(bath: Bath) -> "NDArray[np.float64]":
    """Lowering operator each bath couples to, in the product basis."""
    match bath:
        case Bath.COLD:
            lower = np.zeros((QUBIT_DIM, QUBIT_DIM))
            lower[0, 1] = 1
            return np.kron(lower, np.eye(QUTRIT_DIM))
        case Bath.HOT:
            lower = np.zeros((QUTRIT_DIM, QUTRIT_DIM))
            lower[0, 1] = 1
            return np.kron(np.eye(QUBIT_DIM), lower)
        case Bath.WORK:
            lower = np.zeros((QUTRIT_DIM, QUTRIT_DIM))
            lower[0, 2] = 1
            return np.kron(np.eye(QUBIT_DIM), lower)


def _group_gaps(gaps: "list[float]") -> "list[float]":
    centres: list[float] = []
    for gap in sorted(gaps):
        if not centres or gap - centres[-1] > GAP_TOL * max(1.0, gap):
            centres.append(gap)
    return centres


def emission_components(
    bath: Bath, eigenbasis: EnergyEigenbasis
) -> "list[tuple[float, NDArray[np.complex128]]]":
    """Split a bath's lowering operator into energy-lowering eigenoperators.

    Every matrix element ``<a|X|b>`` with ``E_b > E_a`` goes to the channel
    whose frequency is the gap ``E_b - E_a``; equal gaps share a channel.
    """
    x = eigenbasis.to_energy(bare_coupling(bath))
    energies = eigenbasis.eigenvalues
    elements: list[tuple[int, int, float]] = []
    for a, b in zip(*np.nonzero(np.abs(x) > 1e-14), strict=True):
        gap = energies[b] - energies[a]
        if gap <= GAP_TOL:
            err = f"bath {bath} couples levels {a + 1} and {b + 1} without a positive gap"
            raise FrequencyDomainError(err)
        elements.append((int(a), int(b), float(gap)))
    channels = []
    for centre in _group_gaps([e[2] for e in elements]):
        op = np.zeros((DIM, DIM), dtype=np.complex128)
        members = [e for e in elements if abs(e[2] - centre) <= GAP_TOL * max(1.0, centre)]
        for a, b, _ in members:
            op[a, b] = x[a, b]
        # gap from the eigenvalues, not the centre of the cluster
        channels.append((float(energies[members[0][1]] - energies[members[0][0]]), op))
    return channels


def build_jump_operators(
    params: RefrigeratorParams, eigenbasis: EnergyEigenbasis | None = None
) -> tuple[JumpOperator, ...]:
    """Emission/absorption pairs of all three baths, emission first."""
    if eigenbasis is None:
        eigenbasis = build_eigenbasis(params)
    jumps: list[JumpOperator] = []
    for bath in Bath:
        temp, kappa = params.temperature(bath), params.kappa(bath)
        for gap, op in emission_components(bath, eigenbasis):
            jumps.append(
                JumpOperator(bath, -gap, op, decay_rate(-gap, temp, kappa, params.cutoff))
            )
            jumps.append(
                JumpOperator(
                    bath, gap, op.conj().T.copy(), decay_rate(gap, temp, kappa, params.cutoff)
                )
            )
    logger.debug("built %d jump operators", len(jumps))
    return tuple(jumps)


def qubit_gibbs(E0: float, temperature: float) -> "NDArray[np.float64]":
    w = np.array([1.0, math.exp(-E0 / temperature)])
    return np.diag(w / w.sum())


def thermal_product_state(params: RefrigeratorParams) -> DensityMatrix:
    """Qubit at T_c times qutrit with |1> weighted by beta_h and |2> by beta_w."""
    params.validate()
    qutrit = np.array(
        [1.0, math.exp(-params.E1 / params.Th), math.exp(-params.E2 / params.Tw)]
    )
    rho = np.kron(qubit_gibbs(params.E0, params.Tc), np.diag(qutrit / qutrit.sum()))
    return DensityMatrix(rho.astype(np.complex128), Basis.PRODUCT)


def gibbs_state(params: RefrigeratorParams, temperature: float) -> DensityMatrix:
    """Gibbs state of the coupled Hamiltonian, energy basis."""
    if temperature <= 0:
        err = f"temperature must be positive, got {temperature}"
        raise ParameterDomainError(err)
    energies = build_eigenbasis(params).eigenvalues
    w = np.exp(-(energies - energies.min()) / temperature)
    return DensityMatrix(np.diag(w / w.sum()).astype(np.complex128), Basis.ENERGY)


def virtual_temperature(params: RefrigeratorParams) -> float:
    denominator = params.E2 / params.Tw - params.E1 / params.Th
    if abs(denominator) <= 1e-15 * (params.E2 / params.Tw):
        err = f"E2/Tw equals E1/Th ({params.E2 / params.Tw:.6g}); virtual temperature diverges"
        raise DegenerateTemperatureError(err)
    return (params.E2 - params.E1) / denominator
