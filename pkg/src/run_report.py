"""Generate run_report.json for auditability."""

import json
from pathlib import Path

from src.config import RunConfig
from src.federation.runner import TrainingRun
from src.utils import hash_values
from src.validation import validate_run_report


def _metrics(m) -> dict:
    return {"mse": m.mse, "rmse": m.rmse, "mae": m.mae}


def build_run_report(run: TrainingRun, cfg: RunConfig, technique: str, regime: str, exp: int | None = None) -> dict:
    """
    Hashes of the resolved config and of every client's input values, plus
    final metrics. No wall-clock fields, so reruns produce identical bytes.
    """
    final = run.reports[-1]
    return {
        "exp": exp,
        "mode": run.mode,
        "technique": technique,
        "regime": regime,
        "seed": cfg.seed,
        "rounds": len(run.reports),
        "clients": [
            {
                "client_id": c.client_id,
                "dist_label": c.series.dist_label,
                "n_points": len(c.series),
                "data_hash": hash_values(c.series.values),
            }
            for c in run.clients
        ],
        "config_hash": cfg.config_hash(),
        "final_cohort": _metrics(final.cohort),
        "final_per_client": {str(cid): _metrics(m) for cid, m in sorted(final.per_client.items())},
    }


def write_run_report(output_path: Path, report: dict) -> Path:
    """Validate against schemas/run_report.schema.json, then write."""
    validate_run_report(report)
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return output_path
