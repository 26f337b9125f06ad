"""LSTM forecaster and its optimizer."""

from src.model.lstm import ModelParams, backward, forward, init_params, mse_loss, param_count, predict
from src.model.optim import AdamState, adam_step, train_epoch

__all__ = [
    "AdamState",
    "ModelParams",
    "adam_step",
    "backward",
    "forward",
    "init_params",
    "mse_loss",
    "param_count",
    "predict",
    "train_epoch",
]
