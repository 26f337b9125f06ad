"""The 18-experiment matrix, per-run output writing, and the suite runner."""

import csv
import logging
import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from src.audit import audit_log
from src.config import RunConfig
from src.errors import ConfigError, D3flError, DataError
from src.federation.runner import TrainingRun, client_forecast, run_centralized, run_federation
from src.pipeline.artifacts import load_cohort_dir, save_checkpoint, write_forecast_csv, write_rounds_csv
from src.pipeline.detrend import DEFAULT_WINDOW, DetrendTechnique
from src.pipeline.series import TimeSeries
from src.pipeline.synth import generate_cohort
from src.run_report import build_run_report, write_run_report
from src.scoring.engine import CohortMetrics
from src.utils import fmt9

log = logging.getLogger("d3fl.experiments")

TECHNIQUE_ORDER = ("none", "differencing", "moving_average", "subtract_mean", "linear_model", "quadratic_model")
REGIME_ORDER = ("gev", "lognorm", "mixed")
MODES = ("centralized", "federated")
N_EXPERIMENTS = len(TECHNIQUE_ORDER) * len(REGIME_ORDER)

SUMMARY_HEADERS = ["exp", "mode", "technique", "regime", "mse", "rmse", "mae"]
SEED_HEADERS = ["exp", "mode", "seed", "technique", "regime", "mse", "rmse", "mae"]
FAILURE_HEADERS = ["exp", "mode", "seed", "error"]


@dataclass(frozen=True)
class ExperimentSpec:
    exp_num: int
    technique: DetrendTechnique
    regime: str
    mode: str = "federated"

    def __post_init__(self):
        if not 1 <= self.exp_num <= N_EXPERIMENTS:
            raise ConfigError(f"experiment number must lie in 1..{N_EXPERIMENTS}, got {self.exp_num}")
        if self.regime not in REGIME_ORDER:
            raise ConfigError(f"unknown regime {self.regime!r}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")

    @property
    def run_name(self) -> str:
        return f"exp_{self.exp_num:02d}_{self.mode}"


def experiment_matrix(mode: str = "federated", window: int = DEFAULT_WINDOW) -> list[ExperimentSpec]:
    """Exps 1-18: technique blocks of three, regimes (gev, lognorm, mixed) within each block."""
    specs = []
    for t, tag in enumerate(TECHNIQUE_ORDER):
        for r, regime in enumerate(REGIME_ORDER):
            specs.append(ExperimentSpec(3 * t + r + 1, DetrendTechnique(tag, window), regime, mode))
    return specs


def parse_experiments(text: str) -> list[int]:
    """'1-18', '1,4,7', '2-4,10' -> sorted unique experiment numbers."""
    nums = set()
    for part in text.split(","):
        m = re.fullmatch(r"\s*(\d+)\s*(?:-\s*(\d+)\s*)?", part)
        if not m:
            raise ConfigError(f"eval.experiments: cannot read {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2) or lo)
        if lo > hi or lo < 1 or hi > N_EXPERIMENTS:
            raise ConfigError(f"eval.experiments: range {part.strip()!r} outside 1..{N_EXPERIMENTS}")
        nums.update(range(lo, hi + 1))
    return sorted(nums)


def select_specs(cfg: RunConfig) -> list[ExperimentSpec]:
    wanted = set(parse_experiments(cfg["eval.experiments"]))
    return [s for s in experiment_matrix(window=cfg["detrend.window"]) if s.exp_num in wanted]


def expand_modes(specs: list[ExperimentSpec], modes) -> list[ExperimentSpec]:
    """One spec per (exp, mode): ascending exp, centralized before federated."""
    ordered = [m for m in MODES if m in set(modes)]
    unknown = set(modes) - set(MODES)
    if unknown:
        raise ConfigError(f"unknown mode(s): {', '.join(sorted(unknown))}")
    return [replace(s, mode=m) for s in sorted(specs, key=lambda s: s.exp_num) for m in ordered]


def select_by_regime(pool: list[TimeSeries], regime: str, n_clients: int) -> list[TimeSeries]:
    """
    Pick real-data clients by label: gev/lognorm take the first n clients with
    that label; mixed takes the first ceil(n/2) gev then the first floor(n/2) lognorm.
    """
    by_label = {label: [s for s in pool if s.dist_label == label] for label in ("gev", "lognorm")}
    if regime in by_label:
        wanted = {regime: n_clients}
    elif regime == "mixed":
        wanted = {"gev": math.ceil(n_clients / 2), "lognorm": n_clients // 2}
    else:
        raise ConfigError(f"unknown regime {regime!r}")
    chosen = []
    for label, count in wanted.items():
        if count and not by_label[label]:
            raise DataError(f"regime {regime} needs {label}-labeled clients; the data directory has none")
        chosen.extend(by_label[label][:count])
    return chosen


def load_cohort(cfg: RunConfig, data_dir: Path | None = None, by_regime: bool = True) -> list[TimeSeries]:
    """Synthetic cohort for cfg, or the client CSVs of data_dir."""
    if data_dir is None:
        return generate_cohort(cfg["synth.regime"], cfg["synth.n_clients"], cfg.synth_config(), cfg.seed)
    pool = load_cohort_dir(data_dir)
    if not by_regime:
        return pool
    return select_by_regime(pool, cfg["synth.regime"], cfg["synth.n_clients"])


def train(mode: str, cohort: list[TimeSeries], cfg: RunConfig) -> TrainingRun:
    runner = run_centralized if mode == "centralized" else run_federation
    return runner(cohort, cfg.technique(), cfg.fed_config())


def write_run_outputs(out_dir: Path, run: TrainingRun, cfg: RunConfig, regime: str, exp: int | None = None) -> dict:
    """rounds.csv, model.ckpt, forecast_<k>.csv, run_report.json and config.resolved for one run."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg.write_resolved(out_dir)
    write_rounds_csv(out_dir / "rounds.csv", run.reports)
    save_checkpoint(out_dir / "model.ckpt", run.final_params)
    for client in run.clients:
        write_forecast_csv(out_dir / f"forecast_{client.client_id}.csv", client_forecast(run.final_params, client))
    report = build_run_report(run, cfg, str(cfg.technique()), regime, exp)
    write_run_report(out_dir / "run_report.json", report)
    return report


@dataclass(frozen=True)
class RunOutcome:
    spec: ExperimentSpec
    seed: int
    cohort: CohortMetrics


@dataclass(frozen=True)
class Failure:
    spec: ExperimentSpec
    seed: int
    error: str


@dataclass
class SuiteResult:
    outcomes: list[RunOutcome] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _mean_metrics(items: list[CohortMetrics]) -> CohortMetrics:
    n = len(items)
    return CohortMetrics.from_mse_mae(
        math.fsum(m.mse for m in items) / n,
        math.fsum(m.mae for m in items) / n,
    )


def summary_rows(outcomes: list[RunOutcome]) -> list[list[str]]:
    """Seed-averaged final cohort metrics per (exp, mode) in suite order."""
    groups: dict[tuple[int, int], list[RunOutcome]] = {}
    for o in outcomes:
        groups.setdefault((o.spec.exp_num, MODES.index(o.spec.mode)), []).append(o)
    rows = []
    for key in sorted(groups):
        spec = groups[key][0].spec
        m = _mean_metrics([o.cohort for o in groups[key]])
        rows.append([str(spec.exp_num), spec.mode, spec.technique.tag, spec.regime, fmt9(m.mse), fmt9(m.rmse), fmt9(m.mae)])
    return rows


def _write_csv(path: Path, headers: list[str], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
    return path


def _run_one(
    spec: ExperimentSpec, seed: int, base_cfg: RunConfig, run_dir: Path, data_dir: Path | None
) -> RunOutcome | Failure:
    started = time.perf_counter()
    try:
        cfg = base_cfg.with_values(**{"seed": seed, "synth.regime": spec.regime, "detrend.technique": spec.technique.tag})
        run = train(spec.mode, load_cohort(cfg, data_dir), cfg)
        write_run_outputs(run_dir, run, cfg, spec.regime, spec.exp_num)
    except D3flError as e:
        log.error("exp %d %s seed %d failed: %s", spec.exp_num, spec.mode, seed, e)
        audit_log("experiment_run", "error", exp=spec.exp_num, mode=spec.mode, seed=seed, error=str(e))
        return Failure(spec, seed, str(e))
    final = run.reports[-1].cohort
    elapsed = time.perf_counter() - started
    log.info(
        "exp %d %s (%s, %s) seed %d: mse %.6g in %.1fs",
        spec.exp_num, spec.mode, spec.technique, spec.regime, seed, final.mse, elapsed,
    )
    audit_log(
        "experiment_run", "success",
        exp=spec.exp_num, mode=spec.mode, seed=seed, wall_time=round(elapsed, 3), final_mse=final.mse,
    )
    return RunOutcome(spec, seed, final)


def run_suite(
    specs: list[ExperimentSpec],
    base_cfg: RunConfig,
    out_dir: Path,
    modes=None,
    data_dir: Path | None = None,
) -> SuiteResult:
    """
    Run every (spec, mode, seed); a failed run is recorded and the suite continues.
    With fed.jobs > 1 independent runs execute concurrently, each in its own directory.
    Writes summary.csv, summary_seeds.csv and, if anything failed, failures.csv.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = expand_modes(specs, modes or base_cfg.modes())
    seeds = base_cfg.seeds()
    base_cfg.write_resolved(out_dir)

    tasks = []
    for spec in runs:
        for seed in seeds:
            run_dir = out_dir / spec.run_name
            if len(seeds) > 1:
                run_dir = run_dir / f"seed_{seed}"
            tasks.append((spec, seed, base_cfg, run_dir, data_dir))

    jobs = base_cfg["fed.jobs"]
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda task: _run_one(*task), tasks))
    else:
        results = [_run_one(*task) for task in tasks]

    result = SuiteResult()
    for r in results:
        if isinstance(r, Failure):
            result.failures.append(r)
        else:
            result.outcomes.append(r)

    _write_csv(out_dir / "summary.csv", SUMMARY_HEADERS, summary_rows(result.outcomes))
    _write_csv(
        out_dir / "summary_seeds.csv",
        SEED_HEADERS,
        (
            [str(o.spec.exp_num), o.spec.mode, str(o.seed), o.spec.technique.tag, o.spec.regime,
             fmt9(o.cohort.mse), fmt9(o.cohort.rmse), fmt9(o.cohort.mae)]
            for o in result.outcomes
        ),
    )
    if result.failures:
        _write_csv(
            out_dir / "failures.csv",
            FAILURE_HEADERS,
            ([str(f.spec.exp_num), f.spec.mode, str(f.seed), f.error] for f in result.failures),
        )
    else:
        (out_dir / "failures.csv").unlink(missing_ok=True)
    return result
