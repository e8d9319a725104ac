import logging

from ..dynamics import (
    cooling_shift,
    cooling_time,
    default_time_grid,
    distance_trajectory,
    steady_state_time,
    temperature_crossing_time,
)
from ..mpemba import compare_families
from ..types import ConfigError, Observable, QFridgeError
from ..utils import format_duration
from .base import ExperimentBase
from .evolve import COOLING_TOL, TRAJECTORY_HEADER, trajectory_rows

logger = logging.getLogger(__name__)


class MpembaExperiment(ExperimentBase):
    """Optimise, verify and time the Mpemba state of every requested family."""

    def execute(self):
        cfg = self.config
        if not cfg.families:
            err = "mpemba needs at least one unitary family"
            raise ConfigError(err)
        blocks, spec = self.decompose()
        shift = cooling_shift(cfg.params, blocks)
        grid = default_time_grid(spec, cfg.grid_points, cfg.grid_lo, cfg.grid_hi)
        rho_th = self.thermal_state()
        reference = distance_trajectory(spec, rho_th, grid)
        self.writer.table("trajectory_thermal", TRAJECTORY_HEADER, trajectory_rows(reference))
        self.record.add("T_s", shift.T_s)
        self.record.add("delta_T", shift.delta_T)
        self.record.add("t_ss_reference", steady_state_time(reference, cfg.epsilon))
        self.record.add("thermal.cooling_time", cooling_time(reference, shift.T_s, COOLING_TOL))
        self.add_slow_modes(spec)

        outcomes = compare_families(spec, rho_th, cfg.families, grid, cfg.epsilon, cfg.optimizer)
        for o in outcomes:
            name, s = str(o.family), o.solution
            self.record.add(f"{name}.feasible", s.feasible)
            self.record.add(f"{name}.residual", s.constraint_residual)
            self.record.add(f"{name}.distance_gain", s.distance_gain)
            self.record.add(f"{name}.verified", o.timing is not None)
            self.record.add(f"{name}.failed_condition", o.failure)
            if o.timing is None or o.trajectory is None:
                continue
            self.writer.table(
                f"trajectory_{name}", TRAJECTORY_HEADER, trajectory_rows(o.trajectory)
            )
            self.record.add(f"{name}.t_M", o.timing.t_M)
            self.record.add(f"{name}.t_ss", o.timing.t_ss_candidate)
            self.record.add(
                f"{name}.cooling_time", cooling_time(o.trajectory, shift.T_s, COOLING_TOL)
            )
            if cfg.observable is Observable.TEMPERATURE:
                try:
                    t_T = temperature_crossing_time(reference, o.trajectory, shift.T_s)
                except QFridgeError as e:
                    logger.info("%s: no temperature crossing: %s", name, e)
                    t_T = None
                self.record.add(f"{name}.t_M_temperature", t_T)
            logger.info(
                "%s: t_M %s, t_ss %s against %s",
                name,
                format_duration(o.timing.t_M),
                format_duration(o.timing.t_ss_candidate),
                format_duration(o.timing.t_ss_reference),
            )
        verified = [o for o in outcomes if o.timing is not None]
        self.record.add("fastest_family", str(verified[0].family) if verified else None)
