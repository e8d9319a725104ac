import logging

import numpy as np

from ..output import log_table
from ..types import NonErgodicError
from .base import ExperimentBase

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-10


class SpectrumExperiment(ExperimentBase):
    """All 36 eigenvalues with their blocks, plus the biorthonormality residuals."""

    def execute(self):
        blocks, spec = self.decompose()
        pop, pairs, scalars = blocks.census()
        census = f"{pop} + {len(blocks.pair_blocks)}x2 + {scalars} = {pop + pairs + scalars}"
        rows = [
            (k + 1, m.eigenvalue.real, m.eigenvalue.imag, m.block)
            for k, m in enumerate(spec.modes)
        ]
        self.writer.table("spectrum", ("mode", "re", "im", "block"), rows)
        log_table(f"spectrum ({census})", ("mode", "re", "im", "block"), rows)

        residual = spec.biorthonormality_residual()
        self.writer.table(
            "biorthonormality",
            ("mode", *(str(k + 1) for k in range(len(spec)))),
            ((i + 1, *row) for i, row in enumerate(residual.tolist())),
        )

        zero_modes = int(np.count_nonzero(np.abs(spec.eigenvalues) <= ZERO_TOL))
        self.record.add("census", census)
        self.record.add("zero_modes", zero_modes)
        self.record.add("decaying_modes", int(np.count_nonzero(spec.eigenvalues.real < -ZERO_TOL)))
        self.record.add("max_biorthonormality_residual", float(residual.max()))
        self.add_slow_modes(spec)
        if zero_modes > 1:
            err = f"{zero_modes} stationary modes; the generator is not ergodic"
            raise NonErgodicError(err)
