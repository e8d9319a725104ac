import csv
import logging
import math
from pathlib import Path

from msgspec import Struct, json
from tabulate import tabulate

from .config import ExperimentConfig
from .types import ExperimentKind, enc_hook

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)

SUMMARY_NAME = "summary.json"

type Cell = float | int | str | bool | None
type Scalar = float | int | str | bool | None


class ResultRecord(Struct, kw_only=True):
    """Summary of one run; non-finite or missing outputs are stored as null."""

    kind: ExperimentKind
    config: ExperimentConfig
    scalars: dict[str, Scalar] = {}
    tables: dict[str, str] = {}
    ok: bool = True

    def add(self, name: str, value: Scalar):
        if isinstance(value, float) and not math.isfinite(value):
            value = None
        self.scalars[name] = value
        return self

    def encode(self) -> bytes:
        return json.format(json.encode(self, enc_hook=enc_hook), indent=2)

    @classmethod
    def decode(cls, buf: bytes):
        return json.decode(buf, type=cls)


def format_cell(v: Cell) -> str:
    match v:
        case None:
            return ""
        case bool():
            return "true" if v else "false"
        case float() if not math.isfinite(v):
            return ""
        case float():
            return format(v, ".17g")
        case _:
            return str(v)


class ResultWriter:
    """Writes the CSV tables and the summary of one run under ``root``."""

    __slots__ = ("record", "root")

    def __init__(self, root: Path, record: ResultRecord):
        self.root = root
        self.record = record

    def table(self, name: str, header: "Sequence[str]", rows: "Iterable[Sequence[Cell]]"):
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / f"{name}.csv"
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(v) for v in row])
        self.record.tables[name] = path.name
        logger.info("wrote %s", path)
        return path

    def summary(self):
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / SUMMARY_NAME
        path.write_bytes(self.record.encode())
        logger.info("wrote %s", path)
        return path


def log_table(title: str, header: "Sequence[str]", rows: "Iterable[Sequence[Cell]]"):
    logger.info("%s\n%s", title, tabulate(list(rows), headers=list(header), floatfmt=".6g"))
