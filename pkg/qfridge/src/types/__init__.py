__all__ = (
    "ABC",
    "ABCMeta",
    "ARGDefault",
    "ARGSBase",
    "ArityError",
    "AxisSpec",
    "Basis",
    "BasisMismatchError",
    "Bath",
    "ConfigError",
    "Decodable",
    "DecompositionError",
    "DegeneracyError",
    "DegenerateTemperatureError",
    "DensityMatrixError",
    "ExperimentKind",
    "FrequencyDomainError",
    "LiouvillianStructureError",
    "NonErgodicError",
    "NotConvergedError",
    "NumericalError",
    "Observable",
    "OrderingError",
    "ParameterDomainError",
    "QFridgeError",
    "Scale",
    "SweepAxis",
    "UnitaryFamily",
    "VerificationError",
    "abstractmethod",
    "enc_hook",
    "tqdm",
)

from ._abc import ABC, ABCMeta, abstractmethod
from .args import ARGDefault, ARGSBase
from .enums import (
    Basis,
    Bath,
    ExperimentKind,
    Observable,
    Scale,
    SweepAxis,
    UnitaryFamily,
)
from .errors import (
    ArityError,
    BasisMismatchError,
    ConfigError,
    DecompositionError,
    DegeneracyError,
    DegenerateTemperatureError,
    DensityMatrixError,
    FrequencyDomainError,
    LiouvillianStructureError,
    NonErgodicError,
    NotConvergedError,
    NumericalError,
    OrderingError,
    ParameterDomainError,
    QFridgeError,
    VerificationError,
)
from .structs import AxisSpec, Decodable, enc_hook
from .tqdm import tqdm
