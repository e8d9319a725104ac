__version__ = "0.1.0"


import logging
import sys
from argparse import ArgumentParser

from msgspec import UNSET
from tqdm.contrib.logging import logging_redirect_tqdm

from .src import ARGSBase
from .src.config import Config, ExperimentConfig
from .src.experiments import create
from .src.log import setup_logging
from .src.types import (
    ARGDefault,
    AxisSpec,
    ConfigError,
    ExperimentKind,
    Observable,
    QFridgeError,
    UnitaryFamily,
)
from .src.utils import (
    add_axis_args,
    add_family_args,
    add_misc_args,
    add_model_args,
    add_opts_args,
    add_time_args,
    encode_json_str,
    unpack_default,
)

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Sequence

    from .src.output import ResultRecord

logger = logging.getLogger(__name__)


class Arguments(ARGSBase):
    E0: float
    E1: float
    g: float
    Tc: float
    Th: float
    Tw: float
    kappa_c: float
    kappa_h: float
    kappa_w: float
    kappa: float | None
    cutoff: float
    no_cold_bath: bool
    epsilon: float
    residual_bound: float
    starts: int
    max_evals: int
    penalty_initial: float
    penalty_growth: float
    penalty_rounds: int
    seed: int
    families: list[UnitaryFamily]
    observable: Observable
    grid_points: int
    grid_lo: float
    grid_hi: float
    axis1: AxisSpec | None
    axis2: AxisSpec | None
    out: str | None
    threads: int
    debug: bool

    config: str | None
    kind: ExperimentKind


def _subparser(subparser, kind: ExperimentKind, help: str):
    sub = subparser.add_parser(str(kind), help=help, add_help=False)
    sub.set_defaults(kind=kind)
    add_misc_args(sub, __version__)
    add_opts_args(sub)
    add_model_args(sub)
    return sub


def parse_args(_args: "Sequence[str] | None" = None):
    parser = ArgumentParser(
        prog="qfridge",
        description="qubit-qutrit absorption refrigerator: spectra, sweeps and Mpemba states",
        add_help=False,
    )
    add_misc_args(parser, __version__)
    parser.set_defaults(
        families=ARGDefault([UnitaryFamily.GLOBAL]),
        observable=ARGDefault(Observable.DISTANCE),
        residual_bound=ARGDefault(1e-8),
        starts=ARGDefault(32),
        max_evals=ARGDefault(2000),
        penalty_initial=ARGDefault(10.0),
        penalty_growth=ARGDefault(10.0),
        penalty_rounds=ARGDefault(6),
        grid_points=ARGDefault(400),
        grid_lo=ARGDefault(0.1),
        grid_hi=ARGDefault(20.0),
        axis1=ARGDefault(None),
        axis2=ARGDefault(None),
    )
    subparser = parser.add_subparsers(required=True, metavar="command")

    _subparser(subparser, ExperimentKind.SPECTRUM, "eigenvalues of the Liouvillian by block")

    sub = _subparser(subparser, ExperimentKind.STEADY_SWEEP, "steady-state cooling over a grid")
    add_axis_args(sub, "g:0.001:0.5:25:linear", "kappa_hw:1e-5:1e-2:25:log")

    sub = _subparser(subparser, ExperimentKind.EVOLVE, "distance and temperature trajectories")
    add_time_args(sub)
    add_family_args(sub, [])

    sub = _subparser(subparser, ExperimentKind.MPEMBA, "optimise and verify Mpemba states")
    add_time_args(sub)
    add_family_args(sub, [UnitaryFamily.GLOBAL])
    sub.add_argument(
        "--observable",
        type=Observable,
        choices=list(Observable),
        default=ARGDefault(Observable.DISTANCE),
        help="also time the crossing of |T - T_s| (default: %(default)s)",
        dest="observable",
    )

    sub = _subparser(subparser, ExperimentKind.TIMING_SWEEP, "Mpemba and steady-state times")
    add_time_args(sub)
    add_family_args(sub, [UnitaryFamily.GLOBAL])
    add_axis_args(sub, "g:0.001:0.2:4:linear", "kappa:1e-5:1e-3:6:log")

    args = parser.parse_args(_args, Arguments())
    config = Config.load(args.config) if args.config else None
    for f, v in args.__iter_fields__():
        if isinstance(v, ARGDefault):
            if config is not None and (nv := getattr(config, f, UNSET)) is not UNSET:
                setattr(args, f, nv)
            else:
                setattr(args, f, unpack_default(v))
    return parser, args


def run(args: Arguments) -> "ResultRecord":
    config = ExperimentConfig.from_values(args.kind, args.resolved())
    logger.debug("resolved config: %s", encode_json_str(config))
    return create(config).run()


def main(_args: "Sequence[str] | None" = None) -> int:
    try:
        argparser, args = parse_args(_args)
    except ConfigError as e:
        setup_logging((__package__,))
        logger.error("%s", e)
        return 1
    setup_logging((__package__,), debug=args.debug)
    logger.debug("using args: %s", args)
    with logging_redirect_tqdm((logging.getLogger(__package__),)):
        try:
            run(args)
        except QFridgeError as e:
            logger.error("%s: %s", type(e).__name__, e, exc_info=args.debug)
            return 1
    return 0


def __main__():
    sys.exit(main())
