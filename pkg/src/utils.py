"""Utilities for hashing, number formatting and timestamps."""

import hashlib
from datetime import datetime, timezone

import numpy as np


def hash_text(text: str) -> str:
    """Compute SHA256 hash of text. Deterministic."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def hash_values(values: np.ndarray) -> str:
    """SHA256 of a float vector's little-endian float64 bytes."""
    data = np.ascontiguousarray(values, dtype="<f8").tobytes()
    return hashlib.sha256(data).hexdigest()


def iso_now() -> str:
    """Current UTC timestamp as ISO string."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


def fmt9(value: float) -> str:
    """Decimal text with 9 significant digits, as used by every CSV output."""
    return f"{float(value):.9g}"


def epoch_to_iso(epoch: int) -> str:
    """Epoch seconds -> ISO-8601 UTC text like 2023-05-11T09:00:00Z."""
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
