"""Run configuration: typed namespaced keys, scale presets, `key = value` files and --set overrides.

Resolution order: defaults -> scale preset -> config file -> --set -> dedicated flags.

File grammar (UTF-8): blank lines and lines starting with `#` are ignored;
every other line is `key = value`. Values are read by the key's type:
int, float, bool (`true` | `false`) or string (rest of the line, stripped).
"""

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType

from src.errors import ConfigError
from src.federation.runner import FederationConfig, ModelConfig
from src.pipeline.detrend import DetrendTechnique
from src.pipeline.ingest import IngestConfig
from src.pipeline.synth import SynthConfig
from src.utils import hash_text
from src.validation import validate_run_config

RESOLVED_NAME = "config.resolved"

# key -> (type, default, help); defaults are the paper-scale values
KEYS: dict[str, tuple[type, object, str]] = {
    "seed": (int, 0, "master seed for every derived random stream"),
    "scale": (str, "paper", "preset: desk | paper"),
    "synth.n_points": (int, 10000, "hourly points per client"),
    "synth.n_clients": (int, 10, "clients in the cohort"),
    "synth.regime": (str, "gev", "gev | lognorm | mixed"),
    "synth.base_level": (float, 8.0, "location baseline"),
    "synth.sine_amplitude": (float, 3.0, "seasonal amplitude"),
    "synth.sine_period": (float, 168.0, "seasonal period in steps"),
    "synth.client_phase_gain": (float, 1.0, "phase shift per client id (radians)"),
    "synth.offset_value": (float, 4.0, "level shift added late in the series"),
    "synth.offset_start_frac": (float, 0.6, "fraction of n_points where the shift starts"),
    "synth.clamp_lo": (float, 2.0, "lower clamp"),
    "synth.clamp_hi": (float, 20.0, "upper clamp"),
    "synth.gev_sigma": (float, 1.0, "GEV noise scale"),
    "synth.gev_xi": (float, 0.1, "GEV noise shape"),
    "synth.lognorm_mu": (float, 0.0, "log-normal noise log-mean"),
    "synth.lognorm_sigma": (float, 0.25, "log-normal noise log-sd"),
    "detrend.technique": (str, "none", "none | differencing | moving_average | subtract_mean | linear_model | quadratic_model"),
    "detrend.window": (int, 24, "moving_average window"),
    "model.hidden": (int, 128, "LSTM hidden units"),
    "model.lookback": (int, 24, "input window length"),
    "model.horizon": (int, 2, "forecast steps"),
    "model.batch_size": (int, 32, "mini-batch size"),
    "model.lr": (float, 1e-3, "Adam learning rate"),
    "model.beta1": (float, 0.9, "Adam beta1"),
    "model.beta2": (float, 0.999, "Adam beta2"),
    "model.eps": (float, 1e-8, "Adam epsilon"),
    "model.train_frac": (float, 0.9, "chronological training share of windows"),
    "fed.rounds": (int, 100, "global rounds (centralized: epochs)"),
    "fed.local_epochs": (int, 1, "client epochs per round"),
    "fed.aggregation": (str, "fedavg", "aggregation rule: fedavg"),
    "fed.jobs": (int, 1, "concurrent clients per round and concurrent experiment runs"),
    "eval.experiments": (str, "1-18", "experiment numbers, e.g. 1-18 or 1,4,7"),
    "eval.modes": (str, "centralized,federated", "training modes to run"),
    "eval.seeds": (int, 1, "seeds per experiment: seed .. seed+k-1"),
    "ingest.timestamp_column": (str, "timestamp", "timestamp column name"),
    "ingest.value_column": (str, "value", "value column name"),
    "ingest.source_step": (int, 900, "source granularity in seconds"),
    "ingest.target_step": (int, 3600, "target granularity in seconds"),
    "ingest.max_missing_frac": (float, 0.05, "largest tolerated share of missing hours"),
    "ingest.labels": (str, "", "distribution label per input file, comma separated (default real)"),
}

PRESETS: dict[str, dict[str, object]] = {
    "paper": {"synth.n_points": 10000, "fed.rounds": 100, "model.hidden": 128},
    "desk": {"synth.n_points": 2000, "fed.rounds": 30, "model.hidden": 32},
}


def parse_value(key: str, text: str, where: str = "") -> object:
    """Read text as the declared type of key."""
    prefix = f"{where}: " if where else ""
    if key not in KEYS:
        raise ConfigError(f"{prefix}unknown key {key!r}")
    kind = KEYS[key][0]
    text = text.strip()
    try:
        if kind is bool:
            if text not in ("true", "false"):
                raise ValueError(text)
            return text == "true"
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
    except ValueError:
        raise ConfigError(f"{prefix}{key}: cannot read {text!r} as {kind.__name__}") from None
    return text


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}: line {lineno}: expected `key = value`, got {line!r}")
        key = key.strip()
        values[key] = parse_value(key, value, f"{source}: line {lineno}")
    return values


def parse_config_file(path: Path) -> dict[str, object]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def parse_overrides(items: Iterable[str]) -> dict[str, object]:
    """--set key=value items."""
    values = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key = key.strip()
        values[key] = parse_value(key, value, "--set")
    return values


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved, validated configuration."""

    values: Mapping[str, object]

    def __post_init__(self):
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def __getitem__(self, key: str):
        return self.values[key]

    def with_values(self, **changes) -> "RunConfig":
        """Copy with dotted keys replaced, e.g. with_values(**{"synth.regime": "mixed"})."""
        merged = dict(self.values)
        for key, value in changes.items():
            if key not in KEYS:
                raise ConfigError(f"unknown key {key!r}")
            merged[key] = value
        validate_run_config(merged)
        return RunConfig(merged)

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def render(self) -> str:
        """Sorted `key = value` text in the config-file grammar."""
        return "".join(f"{k} = {format_value(self.values[k])}\n" for k in sorted(self.values))

    def config_hash(self) -> str:
        return hash_text(self.render())

    def write_resolved(self, out_dir: Path) -> Path:
        path = Path(out_dir) / RESOLVED_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        return path

    def section(self, prefix: str) -> dict[str, object]:
        return {k[len(prefix) + 1 :]: v for k, v in self.values.items() if k.startswith(prefix + ".")}

    def synth_config(self) -> SynthConfig:
        fields = self.section("synth")
        fields.pop("n_clients")
        fields.pop("regime")
        return SynthConfig(**fields)

    def model_config(self) -> ModelConfig:
        return ModelConfig(**self.section("model"))

    def fed_config(self, seed: int | None = None) -> FederationConfig:
        fed = self.section("fed")
        return FederationConfig(
            rounds=fed["rounds"],
            local_epochs=fed["local_epochs"],
            aggregation=fed["aggregation"],
            model=self.model_config(),
            seed=self.seed if seed is None else seed,
            jobs=fed["jobs"],
        )

    def technique(self, tag: str | None = None) -> DetrendTechnique:
        try:
            return DetrendTechnique.parse(tag or self.values["detrend.technique"], self.values["detrend.window"])
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def ingest_config(self) -> IngestConfig:
        fields = self.section("ingest")
        fields.pop("labels")
        return IngestConfig(**fields).validate()

    def ingest_labels(self, n_files: int) -> list[str]:
        text = self.values["ingest.labels"]
        if not text:
            return ["real"] * n_files
        labels = [t.strip() for t in text.split(",")]
        if len(labels) != n_files:
            raise ConfigError(f"ingest.labels lists {len(labels)} labels for {n_files} input files")
        return labels

    def modes(self) -> list[str]:
        return [m.strip() for m in self.values["eval.modes"].split(",")]

    def seeds(self) -> list[int]:
        return [self.seed + k for k in range(self.values["eval.seeds"])]


def defaults() -> dict[str, object]:
    return {key: default for key, (_, default, _) in KEYS.items()}


def resolve_config(
    config_file: Path | None = None,
    overrides: Iterable[str] = (),
    flags: Mapping[str, object] | None = None,
) -> RunConfig:
    """Merge every configuration layer and validate the result."""
    from_file = parse_config_file(config_file) if config_file else {}
    from_set = parse_overrides(overrides)
    from_flags = {k: v for k, v in (flags or {}).items() if v is not None}
    for key in from_flags:
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")

    scale = from_flags.get("scale", from_set.get("scale", from_file.get("scale", KEYS["scale"][1])))
    if scale not in PRESETS:
        raise ConfigError(f"scale: unknown preset {scale!r}; expected one of {', '.join(PRESETS)}")

    values = defaults()
    values.update(PRESETS[scale])
    values.update(from_file)
    values.update(from_set)
    values.update(from_flags)
    values["scale"] = scale
    validate_run_config(values)
    if values["synth.clamp_lo"] >= values["synth.clamp_hi"]:
        raise ConfigError(
            f"synth.clamp_lo ({values['synth.clamp_lo']}) must be below synth.clamp_hi ({values['synth.clamp_hi']})"
        )
    if values["ingest.target_step"] % values["ingest.source_step"]:
        raise ConfigError("ingest.target_step must be a multiple of ingest.source_step")
    return RunConfig(values)


def keys_help() -> str:
    """Every accepted key with its type and default, for --help epilogs."""
    width = max(len(k) for k in KEYS)
    lines = ["configuration keys (--config file or --set key=value):"]
    for key, (kind, default, text) in KEYS.items():
        lines.append(f"  {key:<{width}}  {kind.__name__:<5}  default {format_value(default) or '(empty)'}  {text}")
    lines.append("presets (--scale): " + "; ".join(
        f"{name}: " + ", ".join(f"{k}={v}" for k, v in preset.items()) for name, preset in PRESETS.items()
    ))
    return "\n".join(lines)
