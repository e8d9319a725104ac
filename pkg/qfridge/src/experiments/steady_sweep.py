import logging

from ..dynamics import cooling_shift
from ..model import RefrigeratorParams
from ..pool import ordered_map
from ..types import ConfigError, QFridgeError
from .base import ExperimentBase

TYPE_CHECKING = False
if TYPE_CHECKING:
    from ..types import AxisSpec

logger = logging.getLogger(__name__)


def grid_points(
    base: RefrigeratorParams, axis1: "AxisSpec", axis2: "AxisSpec"
) -> list[tuple[float, float, RefrigeratorParams | None]]:
    """Row-major grid (axis1 outer); points outside the parameter domain carry None."""
    points = []
    for v1 in axis1.values():
        for v2 in axis2.values():
            changes = dict.fromkeys(axis1.name.fields, float(v1))
            changes |= dict.fromkeys(axis2.name.fields, float(v2))
            try:
                params = base.replace(**changes)
            except QFridgeError:
                logger.warning("(%g, %g) lies outside the parameter domain", v1, v2, exc_info=True)
                params = None
            points.append((float(v1), float(v2), params))
    return points


def steady_point(params: RefrigeratorParams | None) -> tuple[float | None, float | None]:
    """(delta_T, T_s), or (None, None) when the point fails."""
    if params is None:
        return None, None
    try:
        shift = cooling_shift(params)
    except QFridgeError:
        logger.warning("steady state failed at %r", params, exc_info=True)
        return None, None
    return shift.delta_T, shift.T_s


class SteadySweepExperiment(ExperimentBase):
    def execute(self):
        cfg = self.config
        if cfg.axis1 is None or cfg.axis2 is None:
            err = "steady-sweep needs axis1 and axis2"
            raise ConfigError(err)
        points = grid_points(cfg.params, cfg.axis1, cfg.axis2)
        results = ordered_map(
            steady_point,
            [p for *_, p in points],
            cfg.optimizer.threads,
            desc="steady states",
        )
        rows = [(v1, v2, dT, Ts) for (v1, v2, _), (dT, Ts) in zip(points, results, strict=True)]
        self.writer.table("steady_sweep", ("param1", "param2", "delta_T", "T_s"), rows)
        cooled = [r for r in rows if r[2] is not None]
        self.record.add("param1", str(cfg.axis1.name))
        self.record.add("param2", str(cfg.axis2.name))
        self.record.add("points", len(rows))
        self.record.add("failed_points", len(rows) - len(cooled))
        self.record.add("cooling_points", sum(1 for r in cooled if r[2] < 0))
        if cooled:
            best = min(cooled, key=lambda r: r[2])
            self.record.add("min_delta_T", best[2])
            self.record.add("min_delta_T_param1", best[0])
            self.record.add("min_delta_T_param2", best[1])
