from argparse import Action, ArgumentTypeError, BooleanOptionalAction

from msgspec import json

from ..types import ARGDefault, AxisSpec, Scale, SweepAxis, UnitaryFamily, enc_hook

TYPE_CHECKING = False
if TYPE_CHECKING:
    from argparse import ArgumentParser
    from typing import Any

JSON_ENC = json.Encoder(enc_hook=enc_hook)


class AppendOverDefault(Action):
    """``append`` that discards an ``ARGDefault`` instead of extending it."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = getattr(namespace, self.dest, None)
        if items is None or isinstance(items, ARGDefault):
            items = []
        setattr(namespace, self.dest, [*items, values])


def encode_json_str(data: "Any"):
    return JSON_ENC.encode(data).decode()


def format_duration(t: float | None) -> str:
    return "absent" if t is None else f"{t:.6g}"


def parse_axis(s: str) -> AxisSpec:
    """``NAME:START:STOP:NUM[:SCALE]``, e.g. ``kappa:1e-5:1e-3:6:log``."""
    name, *rest = s.split(":")
    if len(rest) not in (3, 4):
        err = f"expected NAME:START:STOP:NUM[:SCALE], got {s!r}"
        raise ArgumentTypeError(err)
    try:
        axis = SweepAxis(name.strip().lower())
        scale = Scale(rest[3]) if len(rest) == 4 else default_scale(axis)
        spec = AxisSpec(axis, float(rest[0]), float(rest[1]), int(rest[2], 10), scale)
        spec.values()
    except ValueError as e:
        raise ArgumentTypeError(str(e)) from e
    return spec


def default_scale(axis: SweepAxis) -> Scale:
    return Scale.LINEAR if axis is SweepAxis.G else Scale.LOG


def parse_family(s: str) -> UnitaryFamily:
    try:
        return UnitaryFamily.parse(s)
    except ValueError as e:
        err = f"unknown family {s!r}"
        raise ArgumentTypeError(err) from e


def add_misc_args(parser: "ArgumentParser", version: str):
    misc = parser.add_argument_group("misc")
    misc.add_argument("-h", "--help", action="help", help="print this help and exit")
    misc.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=ARGDefault(value=False),
        help="enable debug log",
        dest="debug",
    )
    misc.add_argument(
        "-V",
        "--version",
        action="version",
        help="print version",
        version=f"%(prog)s {version}",
    )
    return misc


def add_opts_args(parser: "ArgumentParser"):
    options = parser.add_argument_group("options")
    options.add_argument(
        "-c",
        "--config",
        help="load config from FILE (yaml or json)",
        dest="config",
        metavar="FILE",
    )
    options.add_argument(
        "-o",
        "--out",
        default=ARGDefault(None),
        help="output directory (default: $QFRIDGE_OUT or current directory)",
        metavar="DIR",
        dest="out",
    )
    options.add_argument(
        "--seed",
        type=int,
        default=ARGDefault(0),
        metavar="N",
        dest="seed",
    )
    options.add_argument(
        "-t",
        "--threads",
        type=int,
        default=ARGDefault(1),
        help="worker processes, 0 for one per cpu (default: %(default)s)",
        metavar="N",
        dest="threads",
    )
    options.add_argument(
        "--epsilon",
        type=float,
        default=ARGDefault(1e-5),
        help="steady-state distance threshold (default: %(default)s)",
        metavar="EPS",
        dest="epsilon",
    )
    return options


def add_model_args(parser: "ArgumentParser"):
    model = parser.add_argument_group("model")
    for name, default, help in (
        ("E0", 0.7, "qubit gap"),
        ("E1", 1.0, "qutrit 0-1 gap"),
        ("g", 1e-3, "three-body coupling"),
        ("Tc", 1.0, "cold bath temperature"),
        ("Th", 3.0, "hot bath temperature"),
        ("Tw", 1.0, "work bath temperature"),
        ("kappa_c", 1e-4, "cold bath coupling"),
        ("kappa_h", 1e-4, "hot bath coupling"),
        ("kappa_w", 1e-4, "work bath coupling"),
        ("cutoff", 1e3, "ohmic cutoff frequency"),
    ):
        model.add_argument(
            f"--{name.replace('_', '-')}",
            type=float,
            default=ARGDefault(default),
            help=f"{help} (default: %(default)s)",
            metavar="X",
            dest=name,
        )
    model.add_argument(
        "--kappa",
        type=float,
        default=ARGDefault(None),
        help="set all three couplings",
        metavar="X",
        dest="kappa",
    )
    model.add_argument(
        "--no-cold-bath",
        action=BooleanOptionalAction,
        default=ARGDefault(value=False),
        help="set kappa_c = 0 (default: %(default)s)",
        dest="no_cold_bath",
    )
    return model


def add_family_args(parser: "ArgumentParser", default: "list[UnitaryFamily] | None"):
    search = parser.add_argument_group("mpemba search")
    search.add_argument(
        "-f",
        "--family",
        action=AppendOverDefault,
        type=parse_family,
        default=ARGDefault(default),
        help="unitary family, repeatable ({global,local-both,local-qubit,local-qutrit})",
        metavar="FAMILY",
        dest="families",
    )
    search.add_argument(
        "--starts",
        type=int,
        default=ARGDefault(32),
        help="random multi-starts (default: %(default)s)",
        metavar="N",
        dest="starts",
    )
    search.add_argument(
        "--max-evals",
        type=int,
        default=ARGDefault(2000),
        help="objective evaluations per start (default: %(default)s)",
        metavar="N",
        dest="max_evals",
    )
    search.add_argument(
        "--residual-bound",
        type=float,
        default=ARGDefault(1e-8),
        help="feasibility bound on the slow-mode overlap (default: %(default)s)",
        metavar="X",
        dest="residual_bound",
    )
    return search


def add_axis_args(parser: "ArgumentParser", first: str, second: str):
    grid = parser.add_argument_group("grid")
    grid.add_argument(
        "--axis1",
        type=parse_axis,
        default=ARGDefault(parse_axis(first)),
        help="first axis NAME:START:STOP:NUM[:SCALE] (default: %(default)s)",
        metavar="AXIS",
        dest="axis1",
    )
    grid.add_argument(
        "--axis2",
        type=parse_axis,
        default=ARGDefault(parse_axis(second)),
        help="second axis (default: %(default)s)",
        metavar="AXIS",
        dest="axis2",
    )
    return grid


def add_time_args(parser: "ArgumentParser"):
    grid = parser.add_argument_group("time grid")
    grid.add_argument(
        "--grid-points",
        type=int,
        default=ARGDefault(400),
        help="log-spaced samples after t = 0 (default: %(default)s)",
        metavar="N",
        dest="grid_points",
    )
    grid.add_argument(
        "--grid-lo",
        type=float,
        default=ARGDefault(0.1),
        help="first sample in units of 1/|Re l2| (default: %(default)s)",
        metavar="X",
        dest="grid_lo",
    )
    grid.add_argument(
        "--grid-hi",
        type=float,
        default=ARGDefault(20.0),
        help="last sample in units of 1/|Re l2| (default: %(default)s)",
        metavar="X",
        dest="grid_hi",
    )
    return grid


def unpack_default[RT, DT](arg: ARGDefault[DT] | RT) -> DT | RT:
    if isinstance(arg, ARGDefault):
        return arg.value
    return arg
