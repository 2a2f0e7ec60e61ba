import logging
import os

from shiftlab.core.errors import ConfigError

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _positive_int(variable: str, default: str) -> int:
    raw = os.getenv(variable, default)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(variable, raw) from None
    if value < 1:
        raise ConfigError(variable, raw)
    return value


class Settings:
    """Defaults read from the environment once, at construction."""

    def __init__(self) -> None:
        # symbols/edges kept from every infinite family
        self.horizon = _positive_int("SHIFTLAB_HORIZON", "8")
        # block length L for bounded verification
        self.depth = _positive_int("SHIFTLAB_DEPTH", "3")
        level = os.getenv("SHIFTLAB_LOG_LEVEL", "WARNING").upper()
        if level not in _LEVELS:
            raise ConfigError("SHIFTLAB_LOG_LEVEL", level)
        self.log_level = level

    @property
    def log_level_number(self) -> int:
        return int(getattr(logging, self.log_level))

    def to_dict(self) -> dict:
        return {"horizon": self.horizon, "depth": self.depth, "log_level": self.log_level}
