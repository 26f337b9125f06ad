"""Audit trail and application logging for simulator runs."""

import json
import logging
import os
from pathlib import Path

from src.utils import iso_now

LOGGER_NAME = "d3fl"
DEFAULT_LOG_DIR = "logs"


def log_dir() -> Path:
    """D3FL_LOG_DIR, read on every call so tests can redirect it."""
    return Path(os.environ.get("D3FL_LOG_DIR") or DEFAULT_LOG_DIR)


def _ensure_log_dir() -> Path:
    d = log_dir()
    d.mkdir(parents=True, exist_ok=True)
    return d


def audit_log(action: str, status: str, *, error: str | None = None, **fields) -> dict:
    """Append a structured audit entry to the audit log (JSONL)."""
    entry = {
        "timestamp": iso_now(),
        "action": action,
        "status": status,
    }
    for key, value in fields.items():
        if value is not None:
            entry[key] = value
    if error:
        entry["error"] = error

    with open(_ensure_log_dir() / "audit.log", "a", encoding="utf-8") as f:
        f.write(json.dumps(entry, default=str) + "\n")
    return entry


def setup_app_logging() -> logging.Logger:
    """Configure the d3fl logger: console at INFO (or D3FL_LOG_LEVEL), file at DEBUG."""
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        return logger
    logger.setLevel(logging.DEBUG)

    fmt = "%(asctime)s %(levelname)s [%(name)s] %(message)s"
    datefmt = "%Y-%m-%d %H:%M:%S"
    level = os.environ.get("D3FL_LOG_LEVEL", "INFO").upper()

    ch = logging.StreamHandler()
    ch.setLevel(getattr(logging, level, logging.INFO))
    ch.setFormatter(logging.Formatter(fmt, datefmt=datefmt))
    logger.addHandler(ch)

    fh = logging.FileHandler(_ensure_log_dir() / "app.log", encoding="utf-8")
    fh.setLevel(logging.DEBUG)
    fh.setFormatter(logging.Formatter(fmt, datefmt=datefmt))
    logger.addHandler(fh)

    return logger
