__all__ = (
    "ABC",
    "ABCMeta",
    "abstractmethod",
)

import sys as _sys
from abc import ABCMeta as _ABCMeta
from abc import abstractmethod

TYPE_CHECKING = False
if TYPE_CHECKING:
    from typing import Any


def _namespace_annotations(namespace: "dict[str, Any]") -> "dict[str, Any]":
    if _sys.version_info >= (3, 14):
        from annotationlib import Format

        if callable(annotate := namespace.get("__annotate_func__", None)):
            return annotate(Format.FORWARDREF)
        return {}
    return namespace.get("__annotations__", {})


class ABCMeta(_ABCMeta):
    """Turns annotated, unassigned class attributes into ``__slots__``.

    The collected names are also kept in ``__repr_fields__`` (inherited
    fields first) so argument namespaces and experiments can list their state.
    """

    __repr_fields__: tuple[str, ...]
    __slots__: tuple[str, ...]

    def __new__(
        mcls,
        name: str,
        bases: tuple[type, ...],
        namespace: "dict[str, Any]",
        /,
        **kwargs: "Any",
    ):
        if "__slots__" in namespace:
            err = f"{name}: __slots__ is generated from annotations"
            raise TypeError(err)
        slots = tuple(
            f for f in _namespace_annotations(namespace) if f not in namespace
        )
        namespace["__slots__"] = slots
        inherited = [f for b in bases for f in getattr(b, "__repr_fields__", ())]
        namespace["__repr_fields__"] = tuple(dict.fromkeys([*inherited, *slots]))
        return super().__new__(mcls, name, bases, namespace, **kwargs)


class ABC(metaclass=ABCMeta):
    pass
