"""Schema validation for run configurations and run reports."""

import json
from functools import cache
from pathlib import Path

import jsonschema

from src.errors import ConfigError, SchemaError

SCHEMAS_DIR = Path(__file__).resolve().parent.parent / "schemas"


@cache
def _load_schema(name: str) -> dict:
    path = SCHEMAS_DIR / f"{name}.schema.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _where(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def validate_run_config(data: dict) -> None:
    """Validate a resolved config mapping. Raises ConfigError naming the first bad key."""
    try:
        jsonschema.validate(data, _load_schema("run_config"))
    except jsonschema.ValidationError as e:
        raise ConfigError(f"{_where(e)}: {e.message}") from e


def validate_run_report(data: dict) -> None:
    """Validate a run report. Raises SchemaError if invalid."""
    try:
        jsonschema.validate(data, _load_schema("run_report"))
    except jsonschema.ValidationError as e:
        raise SchemaError(f"run_report {_where(e)}: {e.message}") from e
