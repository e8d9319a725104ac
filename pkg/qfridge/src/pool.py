"""Ordered parallel map over sweep points and optimiser starts."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed

from .types import tqdm

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)


def resolve_threads(threads: int) -> int:
    """0 means one worker per CPU."""
    if threads < 0:
        err = f"threads must be nonnegative, got {threads}"
        raise ValueError(err)
    return threads or os.cpu_count() or 1


def ordered_map[T, R](
    func: "Callable[[T], R]",
    items: "Sequence[T]",
    threads: int = 1,
    desc: str | None = None,
    progress: bool = True,
) -> list[R]:
    """``[func(x) for x in items]``, computed in worker processes when threads > 1.

    Results come back in input order whatever the completion order. ``func``
    and the items must be picklable when more than one worker is used.
    """
    workers = min(resolve_threads(threads), len(items))
    with tqdm(total=len(items), desc=desc, disable=not progress) as prog:
        if workers <= 1:
            results = []
            for item in items:
                results.append(func(item))
                prog.update()
            return results
        logger.debug("mapping %d items over %d workers", len(items), workers)
        slots: "list[R | None]" = [None] * len(items)
        with ProcessPoolExecutor(workers) as pool:
            futures = {pool.submit(func, item): i for i, item in enumerate(items)}
            for future in as_completed(futures):
                slots[futures[future]] = future.result()
                prog.update()
        return slots  # type: ignore[return-value]
