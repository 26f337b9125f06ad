"""Comparison report over a suite summary: FL vs centralized, detrending vs none, best technique."""

import csv
from dataclasses import dataclass
from pathlib import Path

from src.errors import SchemaError
from src.scoring.experiments import MODES, REGIME_ORDER, SUMMARY_HEADERS, TECHNIQUE_ORDER
from src.utils import fmt9

COMPARISON_HEADERS = ["section", "mode", "regime", "technique", "base_mse", "mse", "pct_change"]


@dataclass(frozen=True)
class SummaryRow:
    exp: int
    mode: str
    technique: str
    regime: str
    mse: float
    rmse: float
    mae: float


def read_summary(path: Path) -> list[SummaryRow]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"summary not found: {path}")
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = [h for h in SUMMARY_HEADERS if h not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(SummaryRow(
                    int(rec["exp"]), rec["mode"], rec["technique"], rec["regime"],
                    float(rec["mse"]), float(rec["rmse"]), float(rec["mae"]),
                ))
            except ValueError as e:
                raise SchemaError(f"{path}: line {lineno}: {e}") from e
    return rows


def pct_change(new: float, base: float | None) -> float | None:
    """100 * (new - base) / base; None when the base is missing or zero."""
    if base is None or base == 0:
        return None
    return 100.0 * (new - base) / base


def _order(row: SummaryRow) -> tuple:
    def index(seq, v):
        return seq.index(v) if v in seq else len(seq)

    return index(MODES, row.mode), index(REGIME_ORDER, row.regime), index(TECHNIQUE_ORDER, row.technique)


def compare(rows: list[SummaryRow]) -> list[list[str]]:
    """Comparison rows in COMPARISON_HEADERS order; empty cells where a value is undefined."""
    mse = {(r.mode, r.regime, r.technique): r.mse for r in rows}
    out = []

    def cell(v):
        return "" if v is None else fmt9(v)

    for regime in REGIME_ORDER:
        for tech in TECHNIQUE_ORDER:
            central = mse.get(("centralized", regime, tech))
            fed = mse.get(("federated", regime, tech))
            if central is None and fed is None:
                continue
            pct = pct_change(fed, central) if fed is not None else None
            out.append(["fl_vs_centralized", "", regime, tech, cell(central), cell(fed), cell(pct)])

    for row in sorted(rows, key=_order):
        if row.technique == "none":
            continue
        base = mse.get((row.mode, row.regime, "none"))
        out.append(["vs_none", row.mode, row.regime, row.technique, cell(base), cell(row.mse), cell(pct_change(row.mse, base))])

    for mode in MODES:
        for regime in REGIME_ORDER:
            group = [r for r in rows if r.mode == mode and r.regime == regime]
            if not group:
                continue
            best = min(group, key=lambda r: (r.mse, TECHNIQUE_ORDER.index(r.technique) if r.technique in TECHNIQUE_ORDER else 99))
            out.append(["best", mode, regime, best.technique, "", cell(best.mse), ""])
    return out


def write_comparison(summary_path: Path, out_path: Path) -> list[list[str]]:
    rows = compare(read_summary(summary_path))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COMPARISON_HEADERS)
        writer.writerows(rows)
    return rows


def format_table(rows: list[list[str]]) -> str:
    table = [COMPARISON_HEADERS] + rows
    widths = [max(len(r[i]) for r in table) for i in range(len(COMPARISON_HEADERS))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table)
