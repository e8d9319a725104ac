__all__ = ("ExperimentBase", "create")

from .base import ExperimentBase
from .factory import create
