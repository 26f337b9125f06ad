"""Adam optimizer over flat parameter vectors and one-epoch mini-batch training."""

from dataclasses import dataclass, field, replace

import numpy as np

from src.errors import ShapeError
from src.model.lstm import ModelParams, backward, forward, mse_loss
from src.pipeline.windows import WindowedDataset
from src.stats.rng import RngStream

BATCH_SIZE = 32


@dataclass(frozen=True)
class AdamState:
    t: int
    m: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size: int, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(0, np.zeros(size), np.zeros(size), lr, beta1, beta2, eps)


def adam_step(params: np.ndarray, grad: np.ndarray, state: AdamState) -> tuple[np.ndarray, AdamState]:
    """Bias-corrected Adam update. Returns new arrays; inputs are not modified."""
    if params.shape != grad.shape or grad.shape != state.m.shape:
        raise ShapeError(
            f"adam shapes differ: params {params.shape}, grad {grad.shape}, moments {state.m.shape}"
        )
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * (grad * grad)
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, replace(state, t=t, m=m, v=v)


def train_epoch(
    params: ModelParams,
    optstate: AdamState,
    train: WindowedDataset,
    rng: RngStream,
    batch_size: int = BATCH_SIZE,
) -> tuple[ModelParams, AdamState, float]:
    """
    One pass over shuffled windows; gradients are averaged within each batch and
    one Adam step is taken per batch. Returns the window-weighted mean train loss.
    """
    n = len(train)
    if n == 0:
        raise ShapeError("cannot train on an empty dataset")
    order = rng.permutation(n)
    dims = params.dims
    flat = params.flatten()
    total = 0.0
    for start in range(0, n, batch_size):
        idx = order[start : start + batch_size]
        current = ModelParams.unflatten(flat, *dims)
        pred, tape = forward(current, train.inputs[idx])
        total += mse_loss(pred, train.targets[idx]) * idx.size
        grad = backward(current, tape, train.targets[idx])
        flat, optstate = adam_step(flat, grad, optstate)
    return ModelParams.unflatten(flat, *dims), optstate, total / n
