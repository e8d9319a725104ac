from enum import Enum

from msgspec import Struct


class Basis(Enum):
    PRODUCT = "product"
    ENERGY = "energy"

    def __repr__(self):
        return f"{self.__class__.__name__}.{self.name}"


class Bath(Enum):
    COLD = "c"
    HOT = "h"
    WORK = "w"

    def __repr__(self):
        return f"{self.__class__.__name__}.{self.name}"

    def __str__(self):
        return self.value


class Factors(Struct, frozen=True):
    qubit: int
    qutrit: int
    joint: bool

    @property
    def parameter_count(self):
        if self.joint:
            return (self.qubit * self.qutrit) ** 2
        return self.qubit**2 + self.qutrit**2


class UnitaryFamily(Enum):
    """Unitaries applied to the thermal product state.

    ``GLOBAL`` acts on the joint space; the local kinds are tensor products
    where a factor of dimension 0 stands for the identity.
    """

    GLOBAL = "global"
    LOCAL_BOTH = "local_both"
    LOCAL_QUBIT = "local_qubit"
    LOCAL_QUTRIT = "local_qutrit"

    def __repr__(self):
        return f"{self.__class__.__name__}.{self.name}"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, s: str):
        return cls(s.strip().lower().replace("-", "_"))

    @property
    def factors(self) -> Factors:
        match self:
            case UnitaryFamily.GLOBAL:
                return Factors(2, 3, joint=True)
            case UnitaryFamily.LOCAL_BOTH:
                return Factors(2, 3, joint=False)
            case UnitaryFamily.LOCAL_QUBIT:
                return Factors(2, 0, joint=False)
            case UnitaryFamily.LOCAL_QUTRIT:
                return Factors(0, 3, joint=False)

    @property
    def parameter_count(self) -> int:
        return self.factors.parameter_count


class Observable(Enum):
    DISTANCE = "distance"
    TEMPERATURE = "temperature"

    def __str__(self):
        return self.value


class SweepAxis(Enum):
    """Sweepable parameters; the tied names move several couplings at once."""

    G = "g"
    KAPPA = "kappa"
    KAPPA_C = "kappa_c"
    KAPPA_H = "kappa_h"
    KAPPA_W = "kappa_w"
    KAPPA_HW = "kappa_hw"

    def __str__(self):
        return self.value

    @property
    def fields(self) -> tuple[str, ...]:
        match self:
            case SweepAxis.KAPPA:
                return ("kappa_c", "kappa_h", "kappa_w")
            case SweepAxis.KAPPA_HW:
                return ("kappa_h", "kappa_w")
            case axis:
                return (axis.value,)


class Scale(Enum):
    LINEAR = "linear"
    LOG = "log"

    def __str__(self):
        return self.value


class ExperimentKind(Enum):
    SPECTRUM = "spectrum"
    STEADY_SWEEP = "steady-sweep"
    EVOLVE = "evolve"
    MPEMBA = "mpemba"
    TIMING_SWEEP = "timing-sweep"

    def __repr__(self):
        return f"{self.__class__.__name__}.{self.name}"

    def __str__(self):
        return self.value
