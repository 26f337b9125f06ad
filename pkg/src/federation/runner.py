"""FedAvg orchestration over simulated clients and the centralized baseline.

Per client: detrend -> min-max scale (fit on the training portion) -> window
-> chronological split. Federated rounds broadcast the global model, train
each client for local_epochs, aggregate with fedavg in ascending client_id
order, then evaluate the new global model on every validation set.
"""

import logging
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from src.errors import ConfigError, D3flError, FederationError, LengthError, NumericError, ProtocolError
from src.federation.fedavg import fedavg
from src.model.lstm import INPUTS, ModelParams, init_params, predict
from src.model.optim import AdamState, train_epoch
from src.pipeline.detrend import DetrendState, DetrendTechnique, detrend, restore_forecast
from src.pipeline.series import TimeSeries
from src.pipeline.windows import (
    Scaler,
    WindowedDataset,
    chrono_split,
    concat_datasets,
    fit_scaler,
    make_windows,
    split_point,
)
from src.scoring.engine import CohortMetrics, Metrics, cohort_mean, compute_metrics
from src.stats.rng import RngStream

log = logging.getLogger("d3fl.federation")

# windows beyond lookback + horizon a series must still hold after detrending
MIN_EXTRA_POINTS = 10


@dataclass(frozen=True)
class ModelConfig:
    hidden: int = 128
    lookback: int = 24
    horizon: int = 2
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    train_frac: float = 0.9


@dataclass(frozen=True)
class FederationConfig:
    rounds: int = 100
    local_epochs: int = 1
    aggregation: str = "fedavg"
    model: ModelConfig = field(default_factory=ModelConfig)
    seed: int = 0
    jobs: int = 1

    def validate(self) -> "FederationConfig":
        if self.rounds < 1:
            raise ConfigError(f"fed.rounds must be >= 1, got {self.rounds}")
        if self.local_epochs < 1:
            raise ConfigError(f"fed.local_epochs must be >= 1, got {self.local_epochs}")
        if self.aggregation != "fedavg":
            raise ConfigError(f"unsupported aggregation {self.aggregation!r}")
        return self


@dataclass
class ClientHandle:
    """A simulated client. Owns its data, optimizer state and random stream."""

    client_id: int
    series: TimeSeries = field(repr=False)
    train: WindowedDataset = field(repr=False)
    validation: WindowedDataset = field(repr=False)
    scaler: Scaler
    detrend_state: DetrendState = field(repr=False)
    rng: RngStream
    optstate: AdamState | None = field(default=None, repr=False)

    @property
    def n_train(self) -> int:
        return len(self.train)


@dataclass(frozen=True)
class RoundReport:
    round_index: int
    per_client: dict[int, Metrics]
    cohort: CohortMetrics
    wall_time: float = field(default=0.0, compare=False)


@dataclass
class TrainingRun:
    mode: str
    reports: list[RoundReport]
    final_params: ModelParams
    clients: list[ClientHandle] = field(repr=False)
    trajectory: list[np.ndarray] = field(default_factory=list, repr=False)


def training_stream(seed: int, client_ids) -> RngStream:
    """Shuffling stream keyed by the clients whose windows the trainer sees."""
    return RngStream(seed, "train-" + "-".join(str(c) for c in sorted(client_ids)))


def prepare_client(series: TimeSeries, tech: DetrendTechnique, cfg: FederationConfig) -> ClientHandle:
    mc = cfg.model
    series.require_complete()
    values = series.values
    need = mc.lookback + mc.horizon + MIN_EXTRA_POINTS
    if values.size < need:
        raise LengthError(f"client {series.client_id}: series has {values.size} points, training needs {need}")
    detrended, state = detrend(values, tech)
    n_windows = detrended.size - mc.lookback - mc.horizon + 1
    cut = split_point(n_windows, mc.train_frac) if n_windows > 0 else 0
    if cut < 1 or cut >= n_windows:
        raise LengthError(
            f"client {series.client_id}: {max(n_windows, 0)} windows after {tech} leave no train/validation split"
        )
    # scaler sees only values reachable from training windows
    scaler = fit_scaler(detrended[: cut + mc.lookback + mc.horizon - 1])
    windows = make_windows(scaler.apply(detrended), mc.lookback, mc.horizon, scaler)
    train, validation = chrono_split(windows, mc.train_frac)
    return ClientHandle(
        client_id=series.client_id,
        series=series,
        train=train,
        validation=validation,
        scaler=scaler,
        detrend_state=state,
        rng=training_stream(cfg.seed, [series.client_id]),
    )


def prepare_clients(cohort: list[TimeSeries], tech: DetrendTechnique, cfg: FederationConfig) -> list[ClientHandle]:
    ids = [s.client_id for s in cohort]
    if len(set(ids)) != len(ids):
        raise ProtocolError(f"client ids must be unique within a cohort, got {ids}")
    if not cohort:
        raise ProtocolError("cohort is empty")
    return [prepare_client(s, tech, cfg) for s in sorted(cohort, key=lambda s: s.client_id)]


def _fresh_optstate(params: ModelParams, mc: ModelConfig) -> AdamState:
    return AdamState.zeros(params.flatten().size, mc.lr, mc.beta1, mc.beta2, mc.eps)


def initial_params(cfg: FederationConfig) -> ModelParams:
    return init_params(cfg.model.hidden, INPUTS, cfg.model.horizon, RngStream(cfg.seed, "model-init"))


def evaluate(params: ModelParams, clients: list[ClientHandle], round_index: int, wall_time: float = 0.0) -> RoundReport:
    per_client = {}
    for client in clients:
        pred = predict(params, client.validation.inputs)
        per_client[client.client_id] = compute_metrics(pred, client.validation.targets)
    return RoundReport(round_index, per_client, cohort_mean(per_client.values()), wall_time)


def _local_update(client: ClientHandle, global_params: ModelParams, cfg: FederationConfig) -> tuple[np.ndarray, int]:
    params = global_params
    if client.optstate is None:
        client.optstate = _fresh_optstate(params, cfg.model)
    try:
        for _ in range(cfg.local_epochs):
            params, client.optstate, loss = train_epoch(
                params, client.optstate, client.train, client.rng, cfg.model.batch_size
            )
    except D3flError as e:
        raise FederationError(client.client_id, str(e)) from e
    log.debug("client %d: local train loss %.6g", client.client_id, loss)
    return params.flatten(), client.n_train


def run_round(
    global_params: ModelParams,
    clients: list[ClientHandle],
    cfg: FederationConfig,
    round_index: int = 1,
    executor: Executor | None = None,
) -> tuple[ModelParams, RoundReport]:
    """One broadcast -> local training -> fedavg -> evaluation cycle."""
    if not clients:
        raise ProtocolError("round has no clients")
    started = time.perf_counter()
    ordered = sorted(clients, key=lambda c: c.client_id)
    if executor is None:
        results = [_local_update(c, global_params, cfg) for c in ordered]
    else:
        futures = [executor.submit(_local_update, c, global_params, cfg) for c in ordered]
        results = [f.result() for f in futures]
    merged = fedavg(results)
    if not np.all(np.isfinite(merged)):
        raise NumericError(f"global model became non-finite in round {round_index}")
    new_global = ModelParams.unflatten(merged, *global_params.dims)
    report = evaluate(new_global, ordered, round_index, time.perf_counter() - started)
    return new_global, report


def run_federation(
    cohort: list[TimeSeries], tech: DetrendTechnique, cfg: FederationConfig, keep_trajectory: bool = False
) -> TrainingRun:
    cfg.validate()
    clients = prepare_clients(cohort, tech, cfg)
    params = initial_params(cfg)
    reports = []
    trajectory = []
    pool = ThreadPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 else nullcontext()
    with pool as executor:
        for r in range(1, cfg.rounds + 1):
            params, report = run_round(params, clients, cfg, r, executor)
            reports.append(report)
            if keep_trajectory:
                trajectory.append(params.flatten())
            log.info("federated round %d/%d: cohort mse %.6g (%.2fs)", r, cfg.rounds, report.cohort.mse, report.wall_time)
    return TrainingRun("federated", reports, params, clients, trajectory)


def run_centralized(
    cohort: list[TimeSeries], tech: DetrendTechnique, cfg: FederationConfig, keep_trajectory: bool = False
) -> TrainingRun:
    """Pooled training, one epoch per round, evaluated per client like the federated run."""
    cfg.validate()
    clients = prepare_clients(cohort, tech, cfg)
    pooled = concat_datasets([c.train for c in clients])
    rng = training_stream(cfg.seed, [c.client_id for c in clients])
    params = initial_params(cfg)
    optstate = _fresh_optstate(params, cfg.model)
    reports = []
    trajectory = []
    for r in range(1, cfg.rounds + 1):
        started = time.perf_counter()
        params, optstate, loss = train_epoch(params, optstate, pooled, rng, cfg.model.batch_size)
        if not params.is_finite():
            raise NumericError(f"centralized model became non-finite in epoch {r}")
        report = evaluate(params, clients, r, time.perf_counter() - started)
        reports.append(report)
        if keep_trajectory:
            trajectory.append(params.flatten())
        log.info("centralized epoch %d/%d: train loss %.6g, cohort mse %.6g", r, cfg.rounds, loss, report.cohort.mse)
    return TrainingRun("centralized", reports, params, clients, trajectory)


def client_forecast(params: ModelParams, client: ClientHandle) -> list[tuple[int, float, float]]:
    """
    (timestamp, actual, predicted) in data units over the validation region,
    taking every horizon-th window so each timestamp appears once.
    """
    val = client.validation
    horizon = val.horizon
    original = client.series.values
    state = client.detrend_state
    preds = predict(params, val.inputs)
    rows = []
    for k in range(0, len(val), horizon):
        start = val.target_index(k)
        restored = restore_forecast(state, start, client.scaler.invert(preds[k]), original)
        for j, value in enumerate(restored):
            idx = start + state.lag + j
            rows.append((client.series.timestamp_at(idx), float(original[idx]), float(value)))
    return rows
