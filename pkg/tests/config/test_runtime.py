import pytest

from mrvae.config.config import get_runtime_config
from mrvae.core.exceptions import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("MRVAE_LOG_LEVEL", "MRVAE_LOG_FILE", "MRVAE_SEED", "MRVAE_TELEMETRY"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    cfg = get_runtime_config()
    assert cfg == {"log_level": "INFO", "log_file": None, "seed": None, "telemetry_enabled": True}


def test_values(monkeypatch):
    monkeypatch.setenv("MRVAE_LOG_LEVEL", "debug")
    monkeypatch.setenv("MRVAE_SEED", "42")
    monkeypatch.setenv("MRVAE_TELEMETRY", "false")
    cfg = get_runtime_config()
    assert cfg["log_level"] == "DEBUG"
    assert cfg["seed"] == 42
    assert cfg["telemetry_enabled"] is False


@pytest.mark.parametrize("name, value", [("MRVAE_LOG_LEVEL", "LOUD"), ("MRVAE_SEED", "x"), ("MRVAE_SEED", "-1")])
def test_invalid(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigError):
        get_runtime_config()
