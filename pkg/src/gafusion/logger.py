import logging
import sys

logger = logging.getLogger("gafusion")
logger.addHandler(logging.NullHandler())

# bench workers log through the same handler, the process name tells them apart
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(processName)s - %(name)s - %(message)s"


def get_log_handler(stream=None):
    formatter = logging.Formatter(LOG_FORMAT)
    log_handler = logging.StreamHandler(stream or sys.stderr)
    log_handler.setFormatter(formatter)
    log_handler.set_name("gafusion-cli")
    return log_handler


def enable_logging(level: str):
    """Set the package log level and attach the stderr handler once; stdout carries results."""
    logger.setLevel(getattr(logging, level))
    if not any(handler.get_name() == "gafusion-cli" for handler in logger.handlers):
        logger.addHandler(get_log_handler())
