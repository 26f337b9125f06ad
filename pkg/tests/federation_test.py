"""FedAvg rounds, the centralized baseline and their equivalence on one client."""

import os
from dataclasses import replace

import numpy as np
import pytest

from src.errors import ConfigError, LengthError, ProtocolError
from src.federation.runner import (
    FederationConfig,
    ModelConfig,
    client_forecast,
    initial_params,
    prepare_clients,
    run_centralized,
    run_federation,
    run_round,
)
from src.pipeline.detrend import DetrendTechnique
from src.pipeline.series import TimeSeries
from src.pipeline.synth import START_EPOCH, SynthConfig, generate_cohort
from src.pipeline.windows import concat_datasets

SMALL = FederationConfig(rounds=3, model=ModelConfig(hidden=4), seed=3)
NONE = DetrendTechnique("none")


def _cohort(n_clients=3, n_points=120, regime="gev", seed=3):
    return generate_cohort(regime, n_clients, SynthConfig(n_points=n_points), seed)


def test_one_client_federation_matches_centralized_bitwise():
    cfg = replace(SMALL, rounds=10)
    cohort = _cohort(n_clients=1)
    fed = run_federation(cohort, NONE, cfg, keep_trajectory=True)
    central = run_centralized(cohort, NONE, cfg, keep_trajectory=True)
    assert len(fed.trajectory) == len(central.trajectory) == 10
    for a, b in zip(fed.trajectory, central.trajectory):
        assert np.array_equal(a, b)
    assert [r.per_client for r in fed.reports] == [r.per_client for r in central.reports]


def test_single_client_round_returns_its_local_params():
    cfg = replace(SMALL, rounds=1)
    clients = prepare_clients(_cohort(n_clients=1), NONE, cfg)
    start = initial_params(cfg)
    new_global, report = run_round(start, clients, cfg)
    assert report.round_index == 1
    assert not np.array_equal(new_global.flatten(), start.flatten())
    assert clients[0].optstate.t > 0


def test_federation_is_deterministic():
    cohort = _cohort()
    a = run_federation(cohort, DetrendTechnique("differencing"), SMALL)
    b = run_federation(cohort, DetrendTechnique("differencing"), SMALL)
    assert np.array_equal(a.final_params.flatten(), b.final_params.flatten())
    assert [r.cohort for r in a.reports] == [r.cohort for r in b.reports]


def test_concurrent_clients_match_sequential():
    cohort = _cohort(n_clients=4)
    sequential = run_federation(cohort, NONE, SMALL)
    threaded = run_federation(cohort, NONE, replace(SMALL, jobs=4))
    assert np.array_equal(sequential.final_params.flatten(), threaded.final_params.flatten())
    assert [r.per_client for r in sequential.reports] == [r.per_client for r in threaded.reports]


def test_report_cohort_mean_matches_clients():
    run = run_federation(_cohort(), NONE, SMALL)
    assert len(run.reports) == 3
    assert [r.round_index for r in run.reports] == [1, 2, 3]
    for report in run.reports:
        assert sorted(report.per_client) == [1, 2, 3]
        mses = [m.mse for m in report.per_client.values()]
        assert report.cohort.mse == pytest.approx(np.mean(mses), abs=1e-12)
        assert report.cohort.rmse**2 == pytest.approx(report.cohort.mse, rel=1e-12)
        for m in report.per_client.values():
            assert m.rmse == pytest.approx(np.sqrt(m.mse), abs=1e-12)


def test_one_round_gives_one_report():
    run = run_centralized(_cohort(), NONE, replace(SMALL, rounds=1))
    assert len(run.reports) == 1
    with pytest.raises(ConfigError):
        run_federation(_cohort(), NONE, replace(SMALL, rounds=0))


def test_pooled_training_count_is_sum_of_clients():
    clients = prepare_clients(_cohort(), NONE, SMALL)
    pooled = concat_datasets([c.train for c in clients])
    assert len(pooled) == sum(c.n_train for c in clients)
    # 120 points -> 95 windows -> floor(0.9 * 95) train
    assert all(c.n_train == 85 and len(c.validation) == 10 for c in clients)


def test_scaler_is_fit_on_training_values_only():
    clients = prepare_clients(_cohort(), NONE, SMALL)
    for c in clients:
        assert c.train.inputs.min() >= 0.0 and c.train.inputs.max() <= 1.0
        assert c.train.targets.min() >= 0.0 and c.train.targets.max() <= 1.0


def test_short_series_and_duplicate_ids():
    short = TimeSeries(START_EPOCH, 3600, np.linspace(2, 3, 30), client_id=1, dist_label="gev")
    with pytest.raises(LengthError):
        prepare_clients([short], NONE, SMALL)
    cohort = _cohort(n_clients=2)
    twin = replace(cohort[1], client_id=cohort[0].client_id)
    with pytest.raises(ProtocolError):
        prepare_clients([cohort[0], twin], NONE, SMALL)


def test_forecast_rows_cover_validation_region_in_data_units():
    cohort = _cohort(n_clients=2)
    for tech in (NONE, DetrendTechnique("differencing"), DetrendTechnique("linear_model")):
        run = run_federation(cohort, tech, replace(SMALL, rounds=1))
        rows = client_forecast(run.final_params, run.clients[0])
        stamps = [ts for ts, _, _ in rows]
        assert stamps == sorted(set(stamps))
        series = run.clients[0].series
        for ts, actual, predicted in rows:
            assert actual == series.values[(ts - series.start_epoch) // series.step]
            assert np.isfinite(predicted)


@pytest.mark.skipif(os.environ.get("D3FL_SLOW") != "1", reason="D3FL_SLOW not set")
@pytest.mark.parametrize("regime", ["gev", "lognorm", "mixed"])
def test_centralized_beats_federated_without_detrending(regime):
    cfg = FederationConfig(rounds=30, model=ModelConfig(hidden=32))
    fed, central = [], []
    for seed in (0, 1, 2):
        cohort = generate_cohort(regime, 10, SynthConfig(n_points=2000), seed)
        seeded = replace(cfg, seed=seed)
        fed.append(run_federation(cohort, NONE, seeded).reports[-1].cohort.mse)
        central.append(run_centralized(cohort, NONE, seeded).reports[-1].cohort.mse)
    assert np.mean(central) < np.mean(fed)


@pytest.mark.skipif(os.environ.get("D3FL_SLOW") != "1", reason="D3FL_SLOW not set")
@pytest.mark.xfail(
    strict=False,
    reason="differenced iid noise has a higher floor than the level series at default synth constants; see DESIGN.md",
)
@pytest.mark.parametrize("regime", ["gev", "lognorm"])
def test_differencing_helps_federated_training(regime):
    cfg = FederationConfig(rounds=30, model=ModelConfig(hidden=32))
    plain, diffed = [], []
    for seed in (0, 1, 2):
        cohort = generate_cohort(regime, 10, SynthConfig(n_points=2000), seed)
        seeded = replace(cfg, seed=seed)
        plain.append(run_federation(cohort, NONE, seeded).reports[-1].cohort.mse)
        diffed.append(run_federation(cohort, DetrendTechnique("differencing"), seeded).reports[-1].cohort.mse)
    assert np.mean(diffed) < np.mean(plain)
