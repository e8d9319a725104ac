import logging

from ..dynamics import (
    Trajectory,
    cooling_shift,
    cooling_time,
    default_time_grid,
    distance_trajectory,
    steady_state_time,
    tail_slope,
)
from ..liouvillian import slowest_mode_set
from ..mpemba import optimize_mpemba_state
from ..types import NotConvergedError, NumericalError
from .base import ExperimentBase

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ("t", "distance", "qubit_temperature")
COOLING_TOL = 1e-3


def trajectory_rows(traj: Trajectory):
    return zip(
        traj.times.tolist(), traj.distances.tolist(), traj.temperatures.tolist(), strict=True
    )


class EvolveExperiment(ExperimentBase):
    """Thermal product state, and the Mpemba state of each requested family, over time."""

    def execute(self):
        cfg = self.config
        blocks, spec = self.decompose()
        shift = cooling_shift(cfg.params, blocks)
        grid = default_time_grid(spec, cfg.grid_points, cfg.grid_lo, cfg.grid_hi)
        rho_th = self.thermal_state()
        self.record.add("T_s", shift.T_s)
        self.record.add("T_c0", shift.T_c0)
        self.record.add("delta_T", shift.delta_T)
        self.add_slow_modes(spec)

        self.describe("thermal", distance_trajectory(spec, rho_th, grid), shift.T_s)
        slow_set = slowest_mode_set(spec) if cfg.families else ()
        for family in cfg.families:
            solution = optimize_mpemba_state(spec, slow_set, rho_th, family, cfg.optimizer)
            self.record.add(f"{family}.feasible", solution.feasible)
            self.record.add(f"{family}.residual", solution.constraint_residual)
            if solution.feasible:
                traj = distance_trajectory(spec, solution.initial_state, grid)
                self.describe(str(family), traj, shift.T_s)

    def describe(self, name: str, traj: Trajectory, T_s: float):
        eps = self.config.epsilon
        self.writer.table(f"trajectory_{name}", TRAJECTORY_HEADER, trajectory_rows(traj))
        try:
            self.record.add(f"{name}.t_ss", steady_state_time(traj, eps))
        except NotConvergedError as e:
            logger.warning("%s: %s", name, e)
            self.record.add(f"{name}.t_ss", None)
        try:
            self.record.add(f"{name}.tail_slope", tail_slope(traj))
        except NumericalError as e:
            logger.debug("%s: no tail slope: %s", name, e)
            self.record.add(f"{name}.tail_slope", None)
        self.record.add(f"{name}.initial_distance", float(traj.distances[0]))
        self.record.add(f"{name}.cooling_time", cooling_time(traj, T_s, COOLING_TOL))
