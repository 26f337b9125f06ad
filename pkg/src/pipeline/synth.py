"""Synthetic non-stationary client series: sine-driven location + GEV/log-normal noise + level shift."""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.errors import ConfigError
from src.pipeline.series import TimeSeries
from src.stats.distributions import GevParams, LogNormParams, Kind, median, sample
from src.stats.rng import RngStream

log = logging.getLogger("d3fl.synth")

# 2023-05-11T09:00:00Z
START_EPOCH = 1683795600
STEP_SECONDS = 3600

Regime = Literal["gev", "lognorm", "mixed"]
REGIMES = ("gev", "lognorm", "mixed")


@dataclass(frozen=True)
class SynthConfig:
    n_points: int = 10000
    base_level: float = 8.0
    sine_amplitude: float = 3.0
    sine_period: float = 168.0
    client_phase_gain: float = 1.0
    offset_value: float = 4.0
    offset_start_frac: float = 0.6
    clamp_lo: float = 2.0
    clamp_hi: float = 20.0
    gev_sigma: float = 1.0
    gev_xi: float = 0.1
    lognorm_mu: float = 0.0
    lognorm_sigma: float = 0.25

    def validate(self) -> "SynthConfig":
        if self.n_points < 1:
            raise ConfigError(f"synth.n_points must be >= 1, got {self.n_points}")
        if not self.clamp_lo < self.clamp_hi:
            raise ConfigError(f"synth.clamp_lo ({self.clamp_lo}) must be below synth.clamp_hi ({self.clamp_hi})")
        if not 0.0 < self.offset_start_frac < 1.0:
            raise ConfigError(f"synth.offset_start_frac must lie in (0, 1), got {self.offset_start_frac}")
        if self.sine_period <= 0:
            raise ConfigError(f"synth.sine_period must be positive, got {self.sine_period}")
        return self

    def noise_params(self, kind: Kind):
        if kind == "gev":
            return GevParams(mu=0.0, sigma=self.gev_sigma, xi=self.gev_xi)
        return LogNormParams(mu=self.lognorm_mu, sigma=self.lognorm_sigma)


def location(t, client_id: int, cfg: SynthConfig):
    """Sine-driven location with a level shift from offset_start_frac * n_points onward."""
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    phase = 2.0 * math.pi * t / cfg.sine_period + cfg.client_phase_gain * client_id
    shift = np.where(t >= cfg.offset_start_frac * cfg.n_points, cfg.offset_value, 0.0)
    loc = cfg.base_level + cfg.sine_amplitude * np.sin(phase) + shift
    return float(loc) if scalar else loc


def generate_client_series(client_id: int, kind: Kind, cfg: SynthConfig, rng: RngStream) -> TimeSeries:
    """Hourly series from 2023-05-11T09:00Z; median-centred noise, clamped to [clamp_lo, clamp_hi]."""
    if kind not in ("gev", "lognorm"):
        raise ConfigError(f"unknown noise distribution {kind!r}")
    cfg.validate()
    try:
        params = cfg.noise_params(kind)
    except ValueError as e:
        raise ConfigError(f"synth noise parameters: {e}") from e

    t = np.arange(cfg.n_points)
    noise = sample(kind, params, cfg.n_points, rng) - median(kind, params)
    raw = location(t, client_id, cfg) + noise
    values = np.clip(raw, cfg.clamp_lo, cfg.clamp_hi)
    clamped = int(np.count_nonzero(values != raw))
    if clamped:
        log.debug("client %d: clamped %d of %d points", client_id, clamped, cfg.n_points)
    return TimeSeries(
        start_epoch=START_EPOCH,
        step=STEP_SECONDS,
        values=values,
        client_id=client_id,
        dist_label=kind,
    )


def regime_labels(regime: Regime, n_clients: int) -> list[str]:
    """Per-client distribution labels; mixed puts gev on the first ceil(n/2) clients."""
    if regime == "gev":
        return ["gev"] * n_clients
    if regime == "lognorm":
        return ["lognorm"] * n_clients
    if regime == "mixed":
        if n_clients < 2:
            raise ConfigError(f"mixed regime needs at least 2 clients, got {n_clients}")
        n_gev = math.ceil(n_clients / 2)
        return ["gev"] * n_gev + ["lognorm"] * (n_clients - n_gev)
    raise ConfigError(f"unknown regime {regime!r}; expected one of {', '.join(REGIMES)}")


def client_stream(master_seed: int, client_id: int) -> RngStream:
    return RngStream(master_seed, f"client-{client_id}-data")


def generate_cohort(regime: Regime, n_clients: int, cfg: SynthConfig, master_seed: int) -> list[TimeSeries]:
    """Clients are numbered 1..n_clients; each draws from its own derived stream."""
    labels = regime_labels(regime, n_clients)
    cohort = [
        generate_client_series(cid, kind, cfg, client_stream(master_seed, cid))
        for cid, kind in enumerate(labels, start=1)
    ]
    log.info("generated %s cohort: %d clients x %d points (seed %d)", regime, n_clients, cfg.n_points, master_seed)
    return cohort
