"""Mpemba initial states: unitaries that remove the slowest mode while moving away from tau.

The search minimises ``-gain + mu * |c|^2`` with nlopt for a growing penalty
weight ``mu``, where ``c`` holds the slow-mode overlaps scaled by the norm of
their left operators. Each start finishes with a Gauss-Newton restoration
on the raw overlaps so the residual can reach the bound exactly enough to be
reported as feasible.
"""

import logging
import math

import nlopt
import numpy as np
import scipy.linalg
from msgspec import Struct, structs

from .dynamics import (
    MpembaTiming,
    Trajectory,
    distance_trajectory,
    mpemba_crossing_time,
    steady_state_time,
    trace_distance,
)
from .liouvillian import SpectralDecomposition, slowest_mode_set
from .model import ENERGY_BASIS, QUBIT_DIM, QUTRIT_DIM, DensityMatrix
from .pool import ordered_map
from .types import (
    ArityError,
    Basis,
    ConfigError,
    NotConvergedError,
    UnitaryFamily,
    VerificationError,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-10
JACOBIAN_STEP = 1e-7


class OptimizerConfig(Struct, frozen=True, kw_only=True, forbid_unknown_fields=True):
    starts: int = 32
    max_evals: int = 2000
    residual_bound: float = 1e-8
    seed: int = 0
    penalty_initial: float = 10.0
    penalty_growth: float = 10.0
    penalty_rounds: int = 6
    init_scale: float = math.pi
    restoration_steps: int = 30
    xtol_rel: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("starts", "max_evals", "penalty_rounds"):
            if getattr(self, name) < 1:
                err = f"{name} must be at least 1, got {getattr(self, name)}"
                raise ConfigError(err)
        if self.max_evals < self.penalty_rounds:
            err = f"max_evals ({self.max_evals}) is below penalty_rounds ({self.penalty_rounds})"
            raise ConfigError(err)
        for name in ("residual_bound", "penalty_initial", "init_scale", "xtol_rel"):
            if not getattr(self, name) > 0:
                err = f"{name} must be positive, got {getattr(self, name)}"
                raise ConfigError(err)
        if not self.penalty_growth > 1:
            err = f"penalty_growth must exceed 1, got {self.penalty_growth}"
            raise ConfigError(err)
        if self.seed < 0 or self.restoration_steps < 0 or self.threads < 0:
            err = "seed, restoration_steps and threads must be nonnegative"
            raise ConfigError(err)

    def replace(self, **changes):
        return structs.replace(self, **changes)


class MpembaSolution(Struct, frozen=True, kw_only=True, eq=False):
    family: UnitaryFamily
    unitary: "NDArray[np.complex128]"
    initial_state: DensityMatrix
    constraint_residual: float
    distance_gain: float
    feasible: bool
    parameters: "NDArray[np.float64]"
    slow_set: tuple[int, ...]
    start: int


def hermitian_generator(dim: int, params: "ArrayLike") -> "NDArray[np.complex128]":
    """Diagonal reals, then real parts, then imaginary parts of the strict upper triangle."""
    p = np.asarray(params, dtype=np.float64)
    if p.shape != (dim * dim,):
        err = f"a {dim}x{dim} Hermitian generator takes {dim * dim} parameters, got {p.size}"
        raise ArityError(err)
    rows, cols = np.triu_indices(dim, 1)
    n = len(rows)
    g = np.diag(p[:dim]).astype(np.complex128)
    g[rows, cols] = p[dim : dim + n] + 1j * p[dim + n :]
    g[cols, rows] = g[rows, cols].conj()
    return g


def _factor(dim: int, params: "NDArray[np.float64]") -> "NDArray[np.complex128]":
    if dim == 0:
        return np.eye(1, dtype=np.complex128)
    return scipy.linalg.expm(1j * hermitian_generator(dim, params))


def parameterize_unitary(family: UnitaryFamily, params: "ArrayLike") -> "NDArray[np.complex128]":
    """Product-basis unitary of ``family`` built from real parameters."""
    p = np.asarray(params, dtype=np.float64).ravel()
    if p.size != family.parameter_count:
        err = f"{family} takes {family.parameter_count} parameters, got {p.size}"
        raise ArityError(err)
    factors = family.factors
    if factors.joint:
        return _factor(QUBIT_DIM * QUTRIT_DIM, p)
    split = factors.qubit**2
    qubit = _factor(factors.qubit, p[:split]) if factors.qubit else np.eye(QUBIT_DIM)
    qutrit = _factor(factors.qutrit, p[split:]) if factors.qutrit else np.eye(QUTRIT_DIM)
    return np.kron(qubit, qutrit).astype(np.complex128)


def apply_unitary(unitary: "NDArray[np.complex128]", rho: DensityMatrix) -> DensityMatrix:
    m = rho.to_product().matrix
    rotated = unitary @ m @ unitary.conj().T
    return DensityMatrix(0.5 * (rotated + rotated.conj().T), Basis.PRODUCT).in_basis(rho.basis)


def mpemba_constraint(
    spec: SpectralDecomposition, slow_set: "Iterable[int]", rho_M0: DensityMatrix
) -> float:
    """max |Tr(l_k rho)| over the slow modes."""
    overlaps = spec.overlaps(rho_M0)
    return float(max((abs(overlaps[k]) for k in slow_set), default=0.0))


class _Problem(Struct, frozen=True, eq=False):
    family: UnitaryFamily
    thermal: "NDArray[np.complex128]"
    steady: DensityMatrix
    lefts: "NDArray[np.complex128]"
    scales: "NDArray[np.float64]"
    base_distance: float
    config: OptimizerConfig

    def energy_state(self, x: "NDArray[np.float64]") -> "NDArray[np.complex128]":
        u = parameterize_unitary(self.family, x)
        rotated = u @ self.thermal @ u.conj().T
        return ENERGY_BASIS @ (0.5 * (rotated + rotated.conj().T)) @ ENERGY_BASIS.T

    def overlaps(self, energy: "NDArray[np.complex128]") -> "NDArray[np.complex128]":
        return np.einsum("kab,ba->k", self.lefts, energy)

    def gain(self, energy: "NDArray[np.complex128]") -> float:
        return trace_distance(DensityMatrix(energy, Basis.ENERGY), self.steady) - self.base_distance

    def residual(self, x: "NDArray[np.float64]") -> float:
        return float(np.max(np.abs(self.overlaps(self.energy_state(x))), initial=0.0))

    def constraint_vector(self, x: "NDArray[np.float64]") -> "NDArray[np.float64]":
        c = self.overlaps(self.energy_state(x))
        return np.concatenate((c.real, c.imag))


class _StartTask(Struct, frozen=True, eq=False):
    problem: _Problem
    index: int
    seed: np.random.SeedSequence


class _StartResult(Struct, frozen=True, eq=False):
    index: int
    x: "NDArray[np.float64]"
    gain: float
    residual: float
    feasible: bool


def _penalised_search(problem: _Problem, x0: "NDArray[np.float64]") -> "NDArray[np.float64]":
    cfg = problem.config
    best = {"f": math.inf, "x": x0.copy()}
    mu = cfg.penalty_initial

    def objective(x, grad):
        energy = problem.energy_state(x)
        c = problem.overlaps(energy) / problem.scales
        f = -problem.gain(energy) + mu * float(np.sum(np.abs(c) ** 2))
        if f < best["f"]:
            best["f"], best["x"] = f, np.array(x)
        return f

    x = x0
    for _ in range(cfg.penalty_rounds):
        best["f"] = math.inf
        opt = nlopt.opt(nlopt.LN_SBPLX, x.size)
        opt.set_min_objective(objective)
        opt.set_maxeval(cfg.max_evals // cfg.penalty_rounds)
        opt.set_xtol_rel(cfg.xtol_rel)
        opt.set_initial_step(0.1 * cfg.init_scale)
        try:
            x = opt.optimize(x)
        except nlopt.RoundoffLimited:
            x = best["x"]
        if problem.residual(x) <= cfg.residual_bound:
            break
        mu *= cfg.penalty_growth
    return np.asarray(x, dtype=np.float64)


def _jacobian(problem: _Problem, x: "NDArray[np.float64]", c: "NDArray[np.float64]"):
    jac = np.empty((c.size, x.size))
    for i in range(x.size):
        step = JACOBIAN_STEP * max(1.0, abs(x[i]))
        shifted = x.copy()
        shifted[i] += step
        jac[:, i] = (problem.constraint_vector(shifted) - c) / step
    return jac


def _restore(problem: _Problem, x: "NDArray[np.float64]") -> "NDArray[np.float64]":
    """Minimum-norm Gauss-Newton steps on the raw slow-mode overlaps."""
    target = 1e-2 * problem.config.residual_bound
    residual = problem.residual(x)
    for _ in range(problem.config.restoration_steps):
        if residual <= target:
            break
        c = problem.constraint_vector(x)
        step = np.linalg.lstsq(_jacobian(problem, x, c), -c, rcond=None)[0]
        for _ in range(8):
            trial = x + step
            if (r := problem.residual(trial)) < residual:
                x, residual = trial, r
                break
            step *= 0.5
        else:
            break
    return x


def _run_start(task: _StartTask) -> _StartResult:
    problem = task.problem
    rng = np.random.default_rng(task.seed)
    scale = problem.config.init_scale
    x0 = rng.uniform(-scale, scale, problem.family.parameter_count)
    x = _restore(problem, _penalised_search(problem, x0))
    energy = problem.energy_state(x)
    gain = problem.gain(energy)
    residual = problem.residual(x)
    feasible = residual <= problem.config.residual_bound and gain > 0
    logger.debug(
        "start %d: gain %.6g, residual %.3e, feasible %s", task.index, gain, residual, feasible
    )
    return _StartResult(task.index, x, gain, residual, feasible)


def _select(results: "Sequence[_StartResult]") -> _StartResult:
    feasible = [r for r in results if r.feasible]
    if feasible:
        return max(feasible, key=lambda r: (r.gain, -r.index))
    return min(results, key=lambda r: (r.residual, r.index))


def optimize_mpemba_state(
    spec: SpectralDecomposition,
    slow_set: "Sequence[int]",
    rho_th0: DensityMatrix,
    family: UnitaryFamily,
    config: OptimizerConfig | None = None,
) -> MpembaSolution:
    """Best multi-start solution; ``feasible`` is False when no start meets the bound."""
    config = config or OptimizerConfig()
    rho_th0.validate()
    lefts = spec.lefts[list(slow_set)]
    problem = _Problem(
        family,
        rho_th0.to_product().matrix,
        spec.steady_state,
        lefts,
        np.linalg.norm(lefts, axis=(1, 2)),
        trace_distance(rho_th0.to_energy(), spec.steady_state),
        config,
    )
    seeds = np.random.SeedSequence(config.seed).spawn(config.starts)
    tasks = [_StartTask(problem, i, s) for i, s in enumerate(seeds)]
    results = ordered_map(_run_start, tasks, config.threads, desc=f"{family} starts")
    chosen = _select(results)
    unitary = parameterize_unitary(family, chosen.x)
    if (drift := np.max(np.abs(unitary @ unitary.conj().T - np.eye(len(unitary))))) > UNITARITY_TOL:
        logger.warning("optimised unitary drifted from unitarity by %.3e", drift)
    solution = MpembaSolution(
        family=family,
        unitary=unitary,
        initial_state=apply_unitary(unitary, rho_th0.to_energy()),
        constraint_residual=chosen.residual,
        distance_gain=chosen.gain,
        feasible=chosen.feasible,
        parameters=chosen.x,
        slow_set=tuple(slow_set),
        start=chosen.index,
    )
    logger.info(
        "%s: feasible=%s, residual %.3e, gain %.6g (start %d of %d)",
        family,
        solution.feasible,
        solution.constraint_residual,
        solution.distance_gain,
        chosen.index,
        config.starts,
    )
    return solution


def verify_mpemba(
    solution: MpembaSolution,
    spec: SpectralDecomposition,
    rho_th0: DensityMatrix,
    grid: "ArrayLike",
    epsilon: float = 1e-5,
) -> MpembaTiming:
    if not solution.feasible:
        err = f"residual {solution.constraint_residual:.3e}, gain {solution.distance_gain:.3e}"
        raise VerificationError("feasibility", err)
    reference = distance_trajectory(spec, rho_th0, grid)
    candidate = distance_trajectory(spec, solution.initial_state, grid)
    d_ref, d_cand = reference.distances[0], candidate.distances[0]
    if not d_cand > d_ref:
        err = f"candidate starts at {d_cand:.6g}, reference at {d_ref:.6g}"
        raise VerificationError("initial-distance", err)
    if (t_M := mpemba_crossing_time(reference, candidate)) is None:
        err = "distance trajectories never cross on the grid"
        raise VerificationError("crossing", err)
    try:
        t_ref = steady_state_time(reference, epsilon)
        t_cand = steady_state_time(candidate, epsilon)
    except NotConvergedError as e:
        raise VerificationError("steady-state-time", str(e)) from e
    if not t_cand < t_ref:
        err = f"candidate reaches {epsilon:.1e} at {t_cand:.6g}, reference at {t_ref:.6g}"
        raise VerificationError("steady-state-time", err)
    return MpembaTiming(t_M=t_M, t_ss_reference=t_ref, t_ss_candidate=t_cand, threshold=epsilon)


class FamilyOutcome(Struct, frozen=True, kw_only=True, eq=False):
    solution: MpembaSolution
    timing: MpembaTiming | None = None
    trajectory: Trajectory | None = None
    failure: str | None = None

    @property
    def family(self) -> UnitaryFamily:
        return self.solution.family


def compare_families(
    spec: SpectralDecomposition,
    rho_th0: DensityMatrix,
    families: "Iterable[UnitaryFamily]",
    grid: "ArrayLike",
    epsilon: float,
    config: OptimizerConfig | None = None,
) -> list[FamilyOutcome]:
    """Optimise and verify each family; verified outcomes first, fastest to tau first."""
    slow_set = slowest_mode_set(spec)
    outcomes = []
    for family in families:
        solution = optimize_mpemba_state(spec, slow_set, rho_th0, family, config)
        try:
            timing = verify_mpemba(solution, spec, rho_th0, grid, epsilon)
        except VerificationError as e:
            logger.info("%s not verified: %s", family, e)
            outcomes.append(FamilyOutcome(solution=solution, failure=e.condition))
            continue
        trajectory = distance_trajectory(spec, solution.initial_state, grid)
        outcomes.append(FamilyOutcome(solution=solution, timing=timing, trajectory=trajectory))
    return sorted(
        outcomes,
        key=lambda o: (o.timing is None, o.timing.t_ss_candidate if o.timing else math.inf),
    )
