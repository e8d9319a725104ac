import logging
import math

import numpy as np
from msgspec import Struct

from .liouvillian import (
    BlockLiouvillian,
    SpectralDecomposition,
    assemble_block_liouvillian,
    solve_steady_state,
)
from .model import DensityMatrix, RefrigeratorParams, thermal_product_state
from .types import (
    Basis,
    DensityMatrixError,
    NotConvergedError,
    NumericalError,
    OrderingError,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

HERMITICITY_DRIFT = 1e-10
CONTRACTIVITY_TOL = 1e-10
CROSSING_TOL = 1e-12
REFINE_RTOL = 1e-3
TAIL_FLOOR = 1e-9


class QubitTemperature(Struct, frozen=True):
    """E0 / ln(p0/p1); ``inf`` at equal populations, negative when inverted."""

    value: float
    inverted: bool = False

    def __float__(self):
        return self.value


class Trajectory(Struct, frozen=True, eq=False):
    times: "NDArray[np.float64]"
    distances: "NDArray[np.float64]"
    temperatures: "NDArray[np.float64]"
    spec: SpectralDecomposition
    initial: DensityMatrix
    states: "NDArray[np.complex128] | None" = None

    def __len__(self):
        return len(self.times)

    def distance_at(self, t: float) -> float:
        return trace_distance(evolve_state(self.spec, self.initial, t), self.spec.steady_state)

    def temperature_at(self, t: float) -> float:
        state = evolve_state(self.spec, self.initial, t)
        return qubit_temperature(state, self.spec.params.E0).value


class MpembaTiming(Struct, frozen=True, kw_only=True):
    t_M: float | None
    t_ss_reference: float
    t_ss_candidate: float
    threshold: float


class CoolingShift(Struct, frozen=True):
    T_s: float
    T_c0: float
    delta_T: float


def _propagate(
    spec: SpectralDecomposition, rho0: DensityMatrix, times: "NDArray[np.float64]"
) -> "NDArray[np.complex128]":
    """Energy-basis states at ``times``, re-Hermitised."""
    coeffs = spec.overlaps(rho0)
    phases = np.exp(np.outer(times, spec.eigenvalues)) * coeffs
    states = np.einsum("tk,kab->tab", phases, spec.rights)
    adjoint = states.conj().transpose(0, 2, 1)
    drift = float(np.max(np.abs(states - adjoint)))
    if drift > HERMITICITY_DRIFT:
        err = f"spectral propagation drifted from Hermiticity by {drift:.3e}"
        raise NumericalError(err)
    return 0.5 * (states + adjoint)


def evolve_state(spec: SpectralDecomposition, rho0: DensityMatrix, t: float) -> DensityMatrix:
    if not math.isfinite(t) or t < 0:
        err = f"time must be finite and nonnegative, got {t}"
        raise ValueError(err)
    rho0.validate()
    state = _propagate(spec, rho0, np.array([float(t)]))[0]
    return DensityMatrix(state, Basis.ENERGY).in_basis(rho0.basis)


def _trace_norms(diff: "NDArray[np.complex128]") -> "NDArray[np.float64]":
    h = 0.5 * (diff + diff.conj().swapaxes(-1, -2))
    return 0.5 * np.abs(np.linalg.eigvalsh(h)).sum(axis=-1)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    b.require_basis(a.basis)
    return float(_trace_norms(a.matrix - b.matrix))


def _temperature_from_populations(p0: float, p1: float, E0: float) -> QubitTemperature:
    if p0 <= 0 or p1 <= 0:
        err = f"qubit populations must be positive, got p0={p0:.3e}, p1={p1:.3e}"
        raise DensityMatrixError(err)
    ratio = math.log(p0 / p1)
    if ratio == 0:
        return QubitTemperature(math.inf)
    return QubitTemperature(E0 / ratio, inverted=ratio < 0)


def qubit_temperature(rho: DensityMatrix, E0: float) -> QubitTemperature:
    marginal = rho.qubit_marginal()
    return _temperature_from_populations(marginal[0, 0].real, marginal[1, 1].real, E0)


def _qubit_temperatures(
    states: "NDArray[np.complex128]", E0: float
) -> "NDArray[np.float64]":
    # energy states 3 and 5 are |10>, |12>; |11> = (e2 + e4)/sqrt2
    m = states
    p1 = (
        m[:, 3, 3].real
        + m[:, 5, 5].real
        + 0.5 * (m[:, 2, 2].real + m[:, 4, 4].real)
        + m[:, 2, 4].real
    )
    p0 = np.trace(m, axis1=1, axis2=2).real - p1
    with np.errstate(divide="ignore"):
        ratio = np.log(p0 / p1)
        return np.where(ratio == 0, np.inf, E0 / ratio)


def cooling_shift(
    params: RefrigeratorParams, blocks: BlockLiouvillian | None = None
) -> CoolingShift:
    """Steady-state qubit temperature against the qubit temperature of the initial state."""
    if blocks is None:
        blocks = assemble_block_liouvillian(params)
    T_s = qubit_temperature(solve_steady_state(blocks), params.E0).value
    T_c0 = qubit_temperature(thermal_product_state(params), params.E0).value
    return CoolingShift(T_s, T_c0, T_s - T_c0)


def default_time_grid(
    spec: SpectralDecomposition, points: int = 400, lo: float = 0.1, hi: float = 20.0
) -> "NDArray[np.float64]":
    """0 followed by ``points`` log-spaced times from lo/|Re l2| to hi/|Re l2|."""
    rate = spec.gap
    if rate <= 0:
        err = "generator has no decaying mode; cannot scale a time grid"
        raise NumericalError(err)
    return np.concatenate(([0.0], np.geomspace(lo / rate, hi / rate, points)))


def distance_trajectory(
    spec: SpectralDecomposition,
    rho0: DensityMatrix,
    grid: "ArrayLike",
    keep_states: bool = False,
) -> Trajectory:
    times = np.asarray(grid, dtype=np.float64)
    if times.ndim != 1 or len(times) == 0 or times[0] != 0 or np.any(np.diff(times) <= 0):
        err = "time grid must start at 0 and increase strictly"
        raise ValueError(err)
    rho0.validate()
    initial = rho0.to_energy()
    states = _propagate(spec, initial, times)
    distances = _trace_norms(states - spec.steady_state.matrix)
    temperatures = _qubit_temperatures(states, spec.params.E0)
    if (rise := float(np.max(np.diff(distances), initial=0))) > CONTRACTIVITY_TOL:
        logger.warning("distance to the steady state increased by %.3e", rise)
    return Trajectory(
        times,
        distances,
        temperatures,
        spec,
        initial,
        states if keep_states else None,
    )


def _bisect(func: "Callable[[float], float]", lo: float, hi: float, rtol: float) -> float:
    """Shrink [lo, hi] with func(lo) > 0 >= func(hi); returns the upper end."""
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if func(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def steady_state_time(traj: Trajectory, epsilon: float, rtol: float = REFINE_RTOL) -> float:
    if epsilon <= 0:
        err = f"epsilon must be positive, got {epsilon}"
        raise ValueError(err)
    above = traj.distances > epsilon
    if not above.any():
        return float(traj.times[0])
    if above[-1]:
        raise NotConvergedError(float(traj.distances[-1]), epsilon)
    k = int(np.nonzero(above)[0][-1])
    return _bisect(
        lambda t: traj.distance_at(t) - epsilon,
        float(traj.times[k]),
        float(traj.times[k + 1]),
        rtol,
    )


def _first_crossing(
    diff: "NDArray[np.float64]",
    times: "NDArray[np.float64]",
    refine: "Callable[[float], float]",
    rtol: float,
) -> float | None:
    if diff[0] < -CROSSING_TOL:
        err = (
            "candidate starts closer to the steady state than the reference "
            f"(difference {diff[0]:.3e})"
        )
        raise OrderingError(err)
    below = np.nonzero(diff < -CROSSING_TOL)[0]
    if len(below) == 0:
        return None
    k = int(below[0])
    return _bisect(refine, float(times[k - 1]), float(times[k]), rtol)


def _check_grids(reference: Trajectory, candidate: Trajectory):
    if not np.array_equal(reference.times, candidate.times):
        err = "trajectories must share one time grid"
        raise ValueError(err)


def mpemba_crossing_time(
    reference: Trajectory, candidate: Trajectory, rtol: float = REFINE_RTOL
) -> float | None:
    """First time the candidate's distance to the steady state drops below the reference's."""
    _check_grids(reference, candidate)
    return _first_crossing(
        candidate.distances - reference.distances,
        reference.times,
        lambda t: candidate.distance_at(t) - reference.distance_at(t),
        rtol,
    )


def temperature_crossing_time(
    reference: Trajectory, candidate: Trajectory, target: float, rtol: float = REFINE_RTOL
) -> float | None:
    """Like ``mpemba_crossing_time`` with |T(t) - target| as the observable."""
    _check_grids(reference, candidate)
    return _first_crossing(
        np.abs(candidate.temperatures - target) - np.abs(reference.temperatures - target),
        reference.times,
        lambda t: abs(candidate.temperature_at(t) - target)
        - abs(reference.temperature_at(t) - target),
        rtol,
    )


def cooling_time(traj: Trajectory, target: float, tol: float = 1e-3) -> float | None:
    """First sampled time after which the qubit temperature stays within tol of target."""
    outside = np.abs(traj.temperatures - target) > tol
    if not outside.any():
        return float(traj.times[0])
    if outside[-1]:
        return None
    return float(traj.times[int(np.nonzero(outside)[0][-1]) + 1])


def tail_slope(traj: Trajectory, floor: float = TAIL_FLOOR, decades: float = 2.0) -> float:
    """Fitted d(ln D)/dt over the samples with floor < D <= floor * 10**decades.

    The floor sits far below any steady-state threshold so the window only
    sees the asymptotic tail, where one decay rate dominates.
    """
    d = traj.distances
    window = (d > floor) & (d <= floor * 10**decades)
    if np.count_nonzero(window) < 3:
        err = f"only {np.count_nonzero(window)} samples in the tail window"
        raise NumericalError(err)
    slope, _ = np.polyfit(traj.times[window], np.log(d[window]), 1)
    return float(slope)


__all__ = (
    "CoolingShift",
    "MpembaTiming",
    "QubitTemperature",
    "Trajectory",
    "cooling_shift",
    "cooling_time",
    "default_time_grid",
    "distance_trajectory",
    "evolve_state",
    "mpemba_crossing_time",
    "qubit_temperature",
    "steady_state_time",
    "tail_slope",
    "temperature_crossing_time",
    "trace_distance",
)
