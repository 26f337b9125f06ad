"""FedAvg: sample-count-weighted average of client parameter vectors."""

from collections.abc import Sequence

import numpy as np

from src.errors import ProtocolError, ShapeError


def _canonical_key(update: tuple[np.ndarray, int]) -> tuple[int, bytes]:
    params, count = update
    return int(count), np.ascontiguousarray(params, dtype="<f8").tobytes()


def fedavg(updates: Sequence[tuple[np.ndarray, int]]) -> np.ndarray:
    """
    Coordinatewise sum(w_k * theta_k) / sum(w_k), w_k = sample count.

    Updates are accumulated in a canonical order (count, then parameter bytes),
    so the result is bitwise independent of the order clients reported in.
    A single update is returned unchanged.
    """
    if not updates:
        raise ProtocolError("fedavg needs at least one client update")
    size = np.asarray(updates[0][0]).shape
    for params, count in updates:
        if np.asarray(params).shape != size:
            raise ShapeError(f"client update has shape {np.asarray(params).shape}, expected {size}")
        if count <= 0:
            raise ProtocolError(f"client update carries a non-positive sample count {count}")
    if len(updates) == 1:
        return np.array(updates[0][0], dtype=float, copy=True)

    ordered = sorted(((np.asarray(p, dtype=float), int(c)) for p, c in updates), key=_canonical_key)
    total = np.zeros(size)
    weight = 0
    for params, count in ordered:
        total += count * params
        weight += count
    return total / weight
