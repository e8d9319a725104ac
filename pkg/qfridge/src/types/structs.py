from pathlib import Path
from typing import ClassVar, Literal, Self

import numpy as np
from msgspec import Struct, json, yaml

from .enums import Scale, SweepAxis

TYPE_CHECKING = False
if TYPE_CHECKING:
    from typing import Any


class Decodable(Struct):
    __jdec__: ClassVar[json.Decoder[Self]]

    @classmethod
    def decode_json(cls, buf: bytes, /) -> Self:
        try:
            return cls.__jdec__.decode(buf)
        except AttributeError:
            cls.__jdec__ = json.Decoder(cls, dec_hook=dec_hook)
            return cls.decode_json(buf)

    @classmethod
    def decode_yaml(cls, buf: bytes, /) -> Self:
        return yaml.decode(buf, type=cls, dec_hook=dec_hook)

    @classmethod
    def from_path(cls, fp: str | Path, fmt: Literal["json", "yaml"] | None = None) -> Self:
        fp = Path(fp)
        if fmt is None:
            fmt = "json" if fp.suffix.lower() == ".json" else "yaml"
        match fmt:
            case "json":
                func = cls.decode_json
            case "yaml":
                func = cls.decode_yaml
            case Never:
                err = f"invalid format: {Never}"
                raise ValueError(err)
        return func(fp.read_bytes())

    def encode(self, fmt: Literal["json", "yaml"] = "yaml") -> bytes:
        match fmt:
            case "json":
                return json.encode(self, enc_hook=enc_hook)
            case "yaml":
                return yaml.encode(self, enc_hook=enc_hook)
            case Never:
                err = f"invalid format: {Never}"
                raise ValueError(err)


class AxisSpec(Struct, frozen=True, forbid_unknown_fields=True):
    name: SweepAxis
    start: float
    stop: float
    num: int
    scale: Scale = Scale.LOG

    def values(self) -> "np.ndarray":
        if self.num < 1:
            err = f"axis {self.name}: num must be positive, got {self.num}"
            raise ValueError(err)
        match self.scale:
            case Scale.LOG:
                if self.start <= 0 or self.stop <= 0:
                    err = f"axis {self.name}: log scale needs positive bounds"
                    raise ValueError(err)
                return np.geomspace(self.start, self.stop, self.num)
            case Scale.LINEAR:
                return np.linspace(self.start, self.stop, self.num)


def dec_hook(type: type, obj: "Any"):
    if type is Path:
        return Path(obj)
    err = f"type {type} is not implemented"
    raise NotImplementedError(err)


def enc_hook(obj: "Any"):
    match obj:
        case Path():
            return str(obj)
        case np.floating() | np.integer():
            return obj.item()
        case np.ndarray():
            return obj.tolist()
    err = f"type {type(obj)} is not implemented"
    raise NotImplementedError(err)
