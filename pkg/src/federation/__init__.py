"""Federated (FedAvg) and centralized training over simulated clients."""

from src.federation.fedavg import fedavg
from src.federation.runner import (
    ClientHandle,
    FederationConfig,
    ModelConfig,
    RoundReport,
    TrainingRun,
    prepare_clients,
    run_centralized,
    run_federation,
    run_round,
)

__all__ = [
    "ClientHandle",
    "FederationConfig",
    "ModelConfig",
    "RoundReport",
    "TrainingRun",
    "fedavg",
    "prepare_clients",
    "run_centralized",
    "run_federation",
    "run_round",
]
