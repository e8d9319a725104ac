__all__ = (
    "ABC",
    "ARGSBase",
    "abstractmethod",
)

from .types import ABC, ARGSBase, abstractmethod
