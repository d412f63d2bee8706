"""Structured logging for solver runs, rank searches and sweeps.

Records go to stderr; stdout carries command results only. Every record emitted
through ``log_event`` names its event and, inside a restart or sweep trial, the
run id held by ``run_id_var``.
"""

import json
import logging
import math
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Final

import numpy as np


LOGGER_NAME: Final = "stiefel-tim"

LEVELS: Final = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# Arrays longer than this are logged by shape only
MAX_LOGGED_ARRAY: Final = 16

run_id_var: ContextVar[str | None] = ContextVar("run_id", default=None)

_RECORD_ATTRS: Final = frozenset(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


def _plain(value: Any) -> Any:  # noqa: ANN401
    """Convert numpy and enum values into JSON-native ones."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        if value.size > MAX_LOGGED_ARRAY:
            return f"<array {value.dtype} {value.shape}>"
        value = value.tolist()
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _extras(record: logging.LogRecord) -> dict[str, Any]:
    return {
        key: _plain(value)
        for key, value in record.__dict__.items()
        if key not in _RECORD_ATTRS and not key.startswith("_") and value is not None
    }


class JSONFormatter(logging.Formatter):
    """One JSON object per record: timestamp, level, message and every extra field."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "message": record.getMessage(),
            **_extras(record),
        }
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_data, default=str)


class TextFormatter(logging.Formatter):
    """Human-readable line with the event, run id and remaining fields appended."""

    def __init__(self) -> None:
        super().__init__("%(asctime)s %(levelname)-7s %(message)s", datefmt="%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        fields = _extras(record)
        event = fields.pop("event", None)
        run_id = fields.pop("run_id", None)
        prefix = " ".join(part for part in (f"[{run_id}]" if run_id else "", event or "") if part)
        suffix = " ".join(f"{key}={value}" for key, value in fields.items())
        return " | ".join(part for part in (line, prefix, suffix) if part)


def setup_logging(level: str = "INFO", log_format: str = "json") -> logging.Logger:
    """Send package logs to stderr, replacing any handler installed earlier.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_format: 'json' for batch runs and sweeps, 'text' for interactive use

    Returns:
        Configured logger instance

    Raises:
        ValueError: If level is not a valid logging level
    """
    level_upper = level.upper()
    if level_upper not in LEVELS:
        msg = f"Invalid logging level: {level}. Must be one of {LEVELS}"
        raise ValueError(msg)

    log = logging.getLogger(LOGGER_NAME)
    log.propagate = False
    log.setLevel(level_upper)
    for old in list(log.handlers):
        log.removeHandler(old)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JSONFormatter() if log_format == "json" else TextFormatter())
    log.addHandler(handler)
    return log


def log_event(level: int, message: str, event: str, **fields: Any) -> None:  # noqa: ANN401
    """Emit a record tagged with an event name and the current run id.

    Args:
        level: Logging level
        message: Human-readable message
        event: Event name (``solver_start``, ``rank_accepted``, ...)
        **fields: Extra structured fields
    """
    if not logger.isEnabledFor(level):
        return
    logger.log(level, message, extra={"event": event, "run_id": run_id_var.get(), **fields})


logger = logging.getLogger(LOGGER_NAME)
