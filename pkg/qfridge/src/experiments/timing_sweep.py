import logging

from ..config import ExperimentConfig
from ..dynamics import (
    default_time_grid,
    distance_trajectory,
    mpemba_crossing_time,
    steady_state_time,
)
from ..liouvillian import assemble_block_liouvillian, slowest_mode_set, spectral_decompose
from ..model import RefrigeratorParams, thermal_product_state
from ..mpemba import OptimizerConfig, optimize_mpemba_state
from ..pool import ordered_map
from ..types import ConfigError, NotConvergedError, QFridgeError, UnitaryFamily
from .base import ExperimentBase
from .steady_sweep import grid_points

logger = logging.getLogger(__name__)

type TimingRow = tuple[float | None, float | None, bool]


def timing_point(
    task: "tuple[RefrigeratorParams | None, UnitaryFamily, OptimizerConfig, ExperimentConfig]",
) -> TimingRow:
    """(t_M, t_ss of the Mpemba state, feasible).

    Feasibility only reflects the optimiser. A feasible point whose curves do
    not cross, or whose candidate stays above epsilon on the grid, keeps the
    missing time empty.
    """
    params, family, optimizer, cfg = task
    if params is None:
        return None, None, False
    try:
        spec = spectral_decompose(assemble_block_liouvillian(params))
        rho_th = thermal_product_state(params)
        solution = optimize_mpemba_state(spec, slowest_mode_set(spec), rho_th, family, optimizer)
    except QFridgeError:
        logger.warning("optimisation failed at %r", params, exc_info=True)
        return None, None, False
    if not solution.feasible:
        return None, None, False
    try:
        grid = default_time_grid(spec, cfg.grid_points, cfg.grid_lo, cfg.grid_hi)
        reference = distance_trajectory(spec, rho_th, grid)
        candidate = distance_trajectory(spec, solution.initial_state, grid)
        t_M = mpemba_crossing_time(reference, candidate)
    except QFridgeError:
        logger.warning("timing failed at %r", params, exc_info=True)
        return None, None, True
    try:
        t_ss = steady_state_time(candidate, cfg.epsilon)
    except NotConvergedError as e:
        logger.info("no steady-state time at %r: %s", params, e)
        t_ss = None
    return t_M, t_ss, True


class TimingSweepExperiment(ExperimentBase):
    """Mpemba time and steady-state time of the first family over a 2D grid."""

    def execute(self):
        cfg = self.config
        if cfg.axis1 is None or cfg.axis2 is None:
            err = "timing-sweep needs axis1 and axis2"
            raise ConfigError(err)
        if not cfg.families:
            err = "timing-sweep needs a unitary family"
            raise ConfigError(err)
        family = cfg.families[0]
        inner = cfg.optimizer.replace(threads=1)
        points = grid_points(cfg.params, cfg.axis1, cfg.axis2)
        results = ordered_map(
            timing_point,
            [(p, family, inner, cfg) for *_, p in points],
            cfg.optimizer.threads,
            desc="timing",
        )
        rows = [(v1, v2, *r) for (v1, v2, _), r in zip(points, results, strict=True)]
        header = (str(cfg.axis1.name), str(cfg.axis2.name), "t_M", "t_ss", "feasible")
        self.writer.table("timing_sweep", header, rows)
        self.record.add("family", str(family))
        self.record.add("param1", str(cfg.axis1.name))
        self.record.add("param2", str(cfg.axis2.name))
        self.record.add("points", len(rows))
        self.record.add("feasible_points", sum(1 for r in rows if r[4]))
        self.record.add("crossing_points", sum(1 for r in rows if r[2] is not None))
