"""d3fl command line: generate, ingest, detrend, train, federate, experiment, report."""

import argparse
import logging
import shutil
import sys
from pathlib import Path

from src.audit import audit_log, setup_app_logging
from src.config import RESOLVED_NAME, RunConfig, keys_help, resolve_config
from src.errors import ConfigError, D3flError
from src.pipeline.artifacts import (
    read_series_csv,
    series_filename,
    write_series_csv,
    write_state_sidecar,
    write_values_csv,
)
from src.pipeline.detrend import TECHNIQUES, detrend
from src.pipeline.ingest import ingest_file
from src.pipeline.synth import REGIMES, generate_cohort
from src.scoring.comparison import format_table, write_comparison
from src.scoring.experiments import load_cohort, run_suite, select_specs, train, write_run_outputs

log = logging.getLogger("d3fl.cli")

EXIT_OK = 0
EXIT_RUN_FAILED = 1
EXIT_USAGE = 2

# dedicated flag -> config key
FLAG_KEYS = {
    "seed": "seed",
    "scale": "scale",
    "jobs": "fed.jobs",
    "regime": "synth.regime",
    "technique": "detrend.technique",
    "window": "detrend.window",
}


def _resolve(args: argparse.Namespace) -> RunConfig:
    flags = {key: getattr(args, name, None) for name, key in FLAG_KEYS.items()}
    return resolve_config(args.config, args.set or (), flags)


def cmd_generate(args: argparse.Namespace) -> int:
    """Synthetic cohort -> client_<k>_<label>.csv files."""
    cfg = _resolve(args)
    out = Path(args.out)
    cohort = generate_cohort(cfg["synth.regime"], cfg["synth.n_clients"], cfg.synth_config(), cfg.seed)
    for series in cohort:
        write_series_csv(out / series_filename(series), series)
    cfg.write_resolved(out)
    print(f"Wrote {len(cohort)} client series to {out}")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    """Real meter CSVs -> hourly, gap-filled client CSVs numbered in input order."""
    cfg = _resolve(args)
    icfg = cfg.ingest_config()
    labels = cfg.ingest_labels(len(args.inputs))
    out = Path(args.out)
    for cid, (path, label) in enumerate(zip(args.inputs, labels), start=1):
        series = ingest_file(path, icfg, cid, label)
        write_series_csv(out / series_filename(series), series)
        print(f"  {path} -> {series_filename(series)} ({len(series)} hours)")
    cfg.write_resolved(out)
    return EXIT_OK


def cmd_detrend(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    tech = cfg.technique()
    series = read_series_csv(args.input)
    detrended, state = detrend(series.values, tech)
    out = Path(args.out) if args.out else args.input.with_name(f"{args.input.stem}_{tech.tag}.csv")
    write_values_csv(out, series.timestamps[state.lag :], detrended)
    write_state_sidecar(out.with_suffix(".state"), state)
    cfg.write_resolved(out.parent)
    print(f"{tech}: {len(series)} -> {detrended.size} values in {out}")
    return EXIT_OK


def _cmd_train(args: argparse.Namespace, mode: str) -> int:
    cfg = _resolve(args)
    cohort = load_cohort(cfg, args.data, by_regime=False)
    run = train(mode, cohort, cfg)
    regime = "data" if args.data else cfg["synth.regime"]
    report = write_run_outputs(Path(args.out), run, cfg, regime)
    final = report["final_cohort"]
    print(f"{mode} ({cfg.technique()}, {regime}): {len(run.reports)} rounds, cohort mse {final['mse']:.6g}")
    print(f"Outputs: {args.out}")
    audit_log(mode, "success", seed=cfg.seed, final_mse=final["mse"], config_hash=report["config_hash"])
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    """Centralized baseline on the pooled cohort."""
    return _cmd_train(args, "centralized")


def cmd_federate(args: argparse.Namespace) -> int:
    return _cmd_train(args, "federated")


def cmd_experiment(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    specs = select_specs(cfg)
    result = run_suite(specs, cfg, Path(args.out), data_dir=args.data)
    print(f"{len(result.outcomes)} runs completed, {len(result.failures)} failed; summary: {Path(args.out) / 'summary.csv'}")
    for f in result.failures:
        print(f"  FAILED exp {f.spec.exp_num} {f.spec.mode} seed {f.seed}: {f.error}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_RUN_FAILED


def cmd_report(args: argparse.Namespace) -> int:
    out = Path(args.out) if args.out else args.summary.parent / "comparison.csv"
    rows = write_comparison(args.summary, out)
    resolved = out.parent / RESOLVED_NAME
    if not resolved.exists():
        suite_resolved = args.summary.parent / RESOLVED_NAME
        if suite_resolved.exists():
            shutil.copyfile(suite_resolved, resolved)
        else:
            resolve_config().write_resolved(out.parent)
    print(format_table(rows))
    print(f"\nComparison: {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d3fl",
        description="Federated vs centralized LSTM forecasting under detrending, on synthetic or real client series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="`key = value` config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one key (repeatable)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--scale", choices=("desk", "paper"), help="size preset")
    common.add_argument("--jobs", type=int, help="concurrent clients per round and experiment runs")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", type=Path, help="directory of client_<k>_<label>.csv files instead of the generator")

    def add(name, func, help_text, parents, default_out):
        p = sub.add_parser(
            name,
            help=help_text,
            parents=parents,
            epilog=keys_help(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        if default_out is not None:
            p.add_argument("--out", type=Path, default=Path(default_out), help=f"output location (default: {default_out})")
        p.set_defaults(func=func)
        return p

    p_gen = add("generate", cmd_generate, "Write a synthetic client cohort as CSVs", [common], "data")
    p_gen.add_argument("--regime", choices=REGIMES, help="noise regime")

    p_ing = add("ingest", cmd_ingest, "Resample and gap-fill real meter CSVs", [common], "data")
    p_ing.add_argument("inputs", type=Path, nargs="+", help="input CSV files, one per client")

    p_det = add("detrend", cmd_detrend, "Detrend one series CSV and write its state sidecar", [common], None)
    p_det.add_argument("input", type=Path, help="timestamp,value CSV")
    p_det.add_argument("--technique", choices=TECHNIQUES, help="detrending technique")
    p_det.add_argument("--window", type=int, help="moving_average window")
    p_det.add_argument("--out", type=Path, help="output CSV (default: <input stem>_<technique>.csv)")

    for name, func, help_text in (
        ("train", cmd_train, "Centralized training on the pooled cohort"),
        ("federate", cmd_federate, "FedAvg training across clients"),
    ):
        p = add(name, func, help_text, [common, data], f"runs/{name}")
        p.add_argument("--regime", choices=REGIMES, help="noise regime of the synthetic cohort")
        p.add_argument("--technique", choices=TECHNIQUES, help="detrending technique")
        p.add_argument("--window", type=int, help="moving_average window")

    p_exp = add("experiment", cmd_experiment, "Run the experiment suite in both modes", [common, data], "runs/experiment")
    p_exp.add_argument("--window", type=int, help="moving_average window for the moving-average experiments")

    p_rep = sub.add_parser("report", help="Compare modes and techniques from a summary.csv")
    p_rep.add_argument("summary", type=Path, help="summary.csv of an experiment suite")
    p_rep.add_argument("--out", type=Path, help="comparison CSV (default: comparison.csv beside the summary)")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse: 0 after --help, 2 on usage errors
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_app_logging()
    try:
        code = args.func(args)
    except ConfigError as e:
        print(f"d3fl {args.command}: configuration error: {e}", file=sys.stderr)
        audit_log(args.command, "error", error=str(e), exit_code=EXIT_USAGE)
        return EXIT_USAGE
    except (D3flError, FileNotFoundError) as e:
        log.error("%s failed: %s", args.command, e)
        print(f"d3fl {args.command}: {e}", file=sys.stderr)
        audit_log(args.command, "error", error=str(e), exit_code=EXIT_RUN_FAILED)
        return EXIT_RUN_FAILED
    audit_log(args.command, "success" if code == EXIT_OK else "failed", exit_code=code)
    return code
