import logging
from functools import cache

TYPE_CHECKING = False
if TYPE_CHECKING:
    from collections.abc import Iterable

LOG_FORMAT = r"%(asctime)s: %(module)s.%(funcName)s: %(levelname)s: %(message)s"


@cache
def default_handler() -> logging.Handler:
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    return handler


def setup_logging(
    loggers: "Iterable[logging.Logger | str]",
    handler: logging.Handler | None = None,
    debug: bool = False,
):
    """Route qfridge loggers to one stream handler; everything else stays at ERROR."""
    handler = handler or default_handler()
    logging.getLogger().setLevel(logging.ERROR)
    for logger in loggers:
        if isinstance(logger, str):
            logger = logging.getLogger(logger)
        if handler not in logger.handlers:
            logger.addHandler(handler)
        logger.setLevel(logging.DEBUG if debug else logging.INFO)
        logger.propagate = False
    return handler
