import pytest

from src.config import resolve_config

# tiny cohort: short series, 2 clients, a 4-unit model, 2 rounds
TINY = [
    "synth.n_points=120",
    "synth.n_clients=2",
    "model.hidden=4",
    "fed.rounds=2",
]


@pytest.fixture(autouse=True)
def _log_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("D3FL_LOG_DIR", str(tmp_path / "logs"))


@pytest.fixture
def tiny_cfg():
    return resolve_config(overrides=TINY, flags={"seed": 5, "scale": "desk"})
