import logging
import os
import sys
from enum import Enum
from typing import Mapping


class LogLevels(Enum):
    ERROR = logging.ERROR
    WARNING = logging.WARNING
    INFO = logging.INFO
    DEBUG = logging.DEBUG


class LevelColorFormatter(logging.Formatter):
    default_fmt = "DriftWiC - %(levelname)s: %(message)s"
    colors = {
        logging.ERROR: "\u001b[31m",
        logging.WARNING: "\u001b[33m",
        logging.INFO: "\u001b[36m",
        logging.DEBUG: "\u001b[35m",
    }

    def __init__(self, use_color: bool = True):
        super().__init__(LevelColorFormatter.default_fmt)
        self.use_color = use_color

    def format(self, record):
        if record.levelno >= logging.WARNING:
            fmt = "%(levelname)s: %(message)s"
        else:
            fmt = "%(message)s"
        color = LevelColorFormatter.colors.get(record.levelno)
        if not self.use_color or color is None:
            self._style._fmt = LevelColorFormatter.default_fmt
        else:
            self._style._fmt = color + fmt + "\u001b[0m"

        return super().format(record)


def _level_from_env() -> LogLevels:
    name = os.getenv("DRIFTWIC_LOG_LEVEL", LogLevels.INFO.name).upper()
    return LogLevels[name] if name in LogLevels.__members__ else LogLevels.INFO


LOG_LEVEL = _level_from_env()
LOGGER = logging.getLogger("DriftWiC")
HANDLER = logging.StreamHandler(sys.stdout)
FORMATTER = LevelColorFormatter(use_color=os.getenv("NO_COLOR") is None)

HANDLER.setLevel(LOG_LEVEL.value)
HANDLER.setFormatter(FORMATTER)

LOGGER.setLevel(LogLevels.DEBUG.value)
LOGGER.addHandler(HANDLER)
LOGGER.propagate = False


def set_log_level(level: str):
    """
    Change the logging level that will be displayed
    Args:
        level: Can be either "ERROR", "WARNING", "INFO" or "DEBUG"
    """
    global LOG_LEVEL

    if level is None or level.upper() not in LogLevels.__members__:
        warning("Invalid log level specified.")
        return

    LOG_LEVEL = LogLevels[level.upper()]
    HANDLER.setLevel(LOG_LEVEL.value)


def log_metrics(prefix: str, metrics: Mapping[str, object]):
    """
    Logs a mapping of metrics as a single `key=value` line
    Args:
        prefix: Text shown before the metrics (epoch number, run label, ...)
        metrics: Metric names and values, floats are shown with 4 decimals
    """
    parts = []
    for key, value in metrics.items():
        if isinstance(value, float):
            parts.append(key + "=" + format(value, ".4f"))
        else:
            parts.append(key + "=" + str(value))
    info(prefix + " " + " ".join(parts))


def error(message: str):
    LOGGER.error(message)


def warning(message: str):
    LOGGER.warning(message)


def info(message: str):
    LOGGER.info(message)


def debug(message: str):
    LOGGER.debug(message)
