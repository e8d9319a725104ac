import logging
import math
import os
from pathlib import Path

from msgspec import UNSET, DecodeError, UnsetType, ValidationError, structs

from .model import RefrigeratorParams
from .mpemba import OptimizerConfig
from .types import (
    AxisSpec,
    ConfigError,
    Decodable,
    ExperimentKind,
    Observable,
    QFridgeError,
    UnitaryFamily,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Mapping
    from typing import Any, Literal

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUT_ENV = "QFRIDGE_OUT"

MODEL_FIELDS = tuple(f.name for f in structs.fields(RefrigeratorParams))
OPTIMIZER_FIELDS = (
    "starts",
    "max_evals",
    "residual_bound",
    "seed",
    "penalty_initial",
    "penalty_growth",
    "penalty_rounds",
    "threads",
)

DEFAULTS: "dict[str, Any]" = {
    **structs.asdict(RefrigeratorParams()),
    **{f: getattr(OptimizerConfig(), f) for f in OPTIMIZER_FIELDS},
    "kappa": None,
    "no_cold_bath": False,
    "epsilon": 1e-5,
    "families": [UnitaryFamily.GLOBAL],
    "observable": Observable.DISTANCE,
    "grid_points": 400,
    "grid_lo": 0.1,
    "grid_hi": 20.0,
    "axis1": None,
    "axis2": None,
    "out": None,
    "debug": False,
}


class Config(Decodable, forbid_unknown_fields=True):
    """Config file contents; anything left out falls back to the CLI default."""

    schema_version: int | UnsetType = UNSET
    E0: float | UnsetType = UNSET
    E1: float | UnsetType = UNSET
    g: float | UnsetType = UNSET
    Tc: float | UnsetType = UNSET
    Th: float | UnsetType = UNSET
    Tw: float | UnsetType = UNSET
    kappa_c: float | UnsetType = UNSET
    kappa_h: float | UnsetType = UNSET
    kappa_w: float | UnsetType = UNSET
    kappa: float | UnsetType = UNSET
    cutoff: float | UnsetType = UNSET
    no_cold_bath: bool | UnsetType = UNSET
    epsilon: float | UnsetType = UNSET
    residual_bound: float | UnsetType = UNSET
    starts: int | UnsetType = UNSET
    max_evals: int | UnsetType = UNSET
    penalty_initial: float | UnsetType = UNSET
    penalty_growth: float | UnsetType = UNSET
    penalty_rounds: int | UnsetType = UNSET
    seed: int | UnsetType = UNSET
    families: list[UnitaryFamily] | UnsetType = UNSET
    observable: Observable | UnsetType = UNSET
    grid_points: int | UnsetType = UNSET
    grid_lo: float | UnsetType = UNSET
    grid_hi: float | UnsetType = UNSET
    axis1: AxisSpec | UnsetType = UNSET
    axis2: AxisSpec | UnsetType = UNSET
    out: str | UnsetType = UNSET
    threads: int | UnsetType = UNSET
    debug: bool | UnsetType = UNSET

    @classmethod
    def load(cls, fp: str | Path, fmt: "Literal['json', 'yaml'] | None" = None):
        try:
            config = cls.from_path(fp, fmt)
        except (DecodeError, ValidationError) as e:
            err = f"{fp}: {e}"
            raise ConfigError(err) from e
        except OSError as e:
            err = f"cannot read config {fp}: {e}"
            raise ConfigError(err) from e
        if config.schema_version not in (UNSET, SCHEMA_VERSION):
            err = f"{fp}: unsupported schema_version {config.schema_version}"
            raise ConfigError(err)
        return config


def default_out() -> str:
    return os.environ.get(OUT_ENV) or "."


class ExperimentConfig(Decodable, kw_only=True, forbid_unknown_fields=True):
    """Fully resolved inputs of one run; echoed into every summary."""

    schema_version: int = SCHEMA_VERSION
    kind: ExperimentKind
    params: RefrigeratorParams
    optimizer: OptimizerConfig
    epsilon: float = 1e-5
    families: tuple[UnitaryFamily, ...] = (UnitaryFamily.GLOBAL,)
    observable: Observable = Observable.DISTANCE
    grid_points: int = 400
    grid_lo: float = 0.1
    grid_hi: float = 20.0
    axis1: AxisSpec | None = None
    axis2: AxisSpec | None = None
    out: str = "."

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            err = f"unsupported schema_version {self.schema_version}"
            raise ConfigError(err)
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            err = f"epsilon must be positive, got {self.epsilon}"
            raise ConfigError(err)
        if self.grid_points < 2:
            err = f"grid_points must be at least 2, got {self.grid_points}"
            raise ConfigError(err)
        if not 0 < self.grid_lo < self.grid_hi:
            err = f"0 < grid_lo < grid_hi violated: {self.grid_lo}, {self.grid_hi}"
            raise ConfigError(err)
        for axis in (self.axis1, self.axis2):
            if axis is not None:
                try:
                    axis.values()
                except ValueError as e:
                    raise ConfigError(str(e)) from e
        if (
            self.axis1 is not None
            and self.axis2 is not None
            and set(self.axis1.name.fields) & set(self.axis2.name.fields)
        ):
            err = f"sweep axes {self.axis1.name} and {self.axis2.name} move the same coupling"
            raise ConfigError(err)

    @property
    def out_path(self) -> Path:
        return Path(self.out)

    def replace(self, **changes: "Any"):
        return structs.replace(self, **changes)

    @classmethod
    def from_values(cls, kind: ExperimentKind, values: "Mapping[str, Any]"):
        """Build from flat resolved values (CLI over config file over defaults)."""
        v = DEFAULTS | {k: x for k, x in values.items() if k in DEFAULTS and x is not None}
        model = {f: v[f] for f in MODEL_FIELDS}
        if v["kappa"] is not None:
            model.update(kappa_c=v["kappa"], kappa_h=v["kappa"], kappa_w=v["kappa"])
        if v["no_cold_bath"]:
            model["kappa_c"] = 0.0
        try:
            return cls(
                kind=kind,
                params=RefrigeratorParams(**model),
                optimizer=OptimizerConfig(**{f: v[f] for f in OPTIMIZER_FIELDS}),
                epsilon=v["epsilon"],
                families=tuple(dict.fromkeys(v["families"])),
                observable=v["observable"],
                grid_points=v["grid_points"],
                grid_lo=v["grid_lo"],
                grid_hi=v["grid_hi"],
                axis1=v["axis1"],
                axis2=v["axis2"],
                out=str(v["out"] or default_out()),
            )
        except ConfigError:
            raise
        except QFridgeError as e:
            raise ConfigError(str(e)) from e
