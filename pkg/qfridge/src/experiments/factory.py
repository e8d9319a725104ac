from ..types import ExperimentKind

TYPE_CHECKING = False
if TYPE_CHECKING:
    from ..config import ExperimentConfig


def create(config: "ExperimentConfig"):
    match config.kind:
        case ExperimentKind.SPECTRUM:
            from .spectrum import SpectrumExperiment as exp

        case ExperimentKind.STEADY_SWEEP:
            from .steady_sweep import SteadySweepExperiment as exp

        case ExperimentKind.EVOLVE:
            from .evolve import EvolveExperiment as exp

        case ExperimentKind.MPEMBA:
            from .mpemba import MpembaExperiment as exp

        case ExperimentKind.TIMING_SWEEP:
            from .timing_sweep import TimingSweepExperiment as exp

        case Never:
            err = f"unknown experiment: {Never}"
            raise ValueError(err)
    return exp(config)
