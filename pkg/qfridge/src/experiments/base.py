import logging

from ..liouvillian import (
    BlockLiouvillian,
    SpectralDecomposition,
    assemble_block_liouvillian,
    spectral_decompose,
)
from ..model import thermal_product_state
from ..output import ResultRecord, ResultWriter
from ..types import ABC, abstractmethod

TYPE_CHECKING = False
if TYPE_CHECKING:
    from ..config import ExperimentConfig
    from ..model import DensityMatrix

logger = logging.getLogger(__name__)


class ExperimentBase(ABC):
    config: "ExperimentConfig"
    record: ResultRecord
    writer: ResultWriter

    def __init__(self, config: "ExperimentConfig"):
        self.config = config
        self.record = ResultRecord(kind=config.kind, config=config)
        self.writer = ResultWriter(config.out_path, self.record)

    def __repr__(self):
        return f"{self.__class__.__name__}(kind={self.config.kind}, out={self.config.out!r})"

    def blocks(self) -> BlockLiouvillian:
        return assemble_block_liouvillian(self.config.params)

    def decompose(self) -> tuple[BlockLiouvillian, SpectralDecomposition]:
        blocks = self.blocks()
        spec = spectral_decompose(blocks)
        logger.debug("lambda_2 = %s, lambda_3 = %s", spec.eigenvalues[1], spec.eigenvalues[2])
        return blocks, spec

    def thermal_state(self) -> "DensityMatrix":
        return thermal_product_state(self.config.params)

    def add_slow_modes(self, spec: SpectralDecomposition):
        for k, name in ((1, "lambda_2"), (2, "lambda_3")):
            self.record.add(f"{name}_re", float(spec.eigenvalues[k].real))
            self.record.add(f"{name}_im", float(spec.eigenvalues[k].imag))

    def run(self) -> ResultRecord:
        logger.info("running %s", self)
        try:
            self.execute()
        except Exception:
            self.record.ok = False
            raise
        finally:
            self.writer.summary()
        return self.record

    @abstractmethod
    def execute(self) -> None: ...
