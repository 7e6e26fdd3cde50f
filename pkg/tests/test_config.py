"""Config loading, strict key validation, overrides and log-level resolution."""

from __future__ import annotations

import logging
import textwrap
from pathlib import Path

import pytest
from support.env import config_file

from quidd_sim.config import ENV_TIME_BUDGET, AppConfig, Limits, ReportSettings, load_config, parse_config
from quidd_sim.errors import ConfigError
from quidd_sim.log import ENV_LOG_LEVEL, resolve_level, setup_logging
from quidd_sim.numerics import ComparisonMode


def write_config(tmp_dir: Path, name: str, body: str) -> Path:
    path = tmp_dir / name
    path.write_text(textwrap.dedent(body).strip() + "\n", encoding="utf-8")
    return path


def test_shipped_default_matches_builtin_defaults():
    assert load_config(config_file("default.yaml")) == AppConfig()
    assert load_config(None) == AppConfig()


def test_shipped_double_config():
    cfg = load_config(config_file("double.yaml"))
    assert cfg.precision.native
    assert cfg.precision.merge_epsilon == 1e-12
    assert cfg.limits == Limits()


def test_shipped_high_precision_config():
    cfg = load_config(config_file("high-precision.yaml"))
    assert cfg.precision.mantissa_bits == 256
    assert cfg.precision.merge_epsilon == 0.0
    assert isinstance(cfg.precision.merge_epsilon, float)
    assert cfg.precision.comparison_mode is ComparisonMode.ABSOLUTE
    assert cfg.limits.time_budget_secs == 1800.0
    assert cfg.report == ReportSettings(top_k=8, amplitude_digits=12)


def test_empty_file_gives_defaults(tmp_path):
    assert load_config(write_config(tmp_path, "empty.yaml", "# nothing")) == AppConfig()


@pytest.mark.parametrize(
    "body, token",
    [
        ("devices: []", "Unknown top-level key: 'devices'"),
        ("precision:\n  bits: 64", "Unknown precision key: 'bits'"),
        ("report:\n  colour: red", "Unknown report key: 'colour'"),
        ("precision:\n  epsilon: 1.0e-12", "precision.epsilon is no longer supported; use precision.merge_epsilon"),
        ("limits:\n  iteration_cap: 100", "limits.iteration_cap is no longer supported; use limits.time_budget_secs"),
        ("precision:\n  mantissa_bits: high", "precision.mantissa_bits must be an integer"),
        ("precision:\n  mantissa_bits: 40", "precision.mantissa_bits must be >= 53"),
        ("precision:\n  merge_epsilon: 0.01", "in relative mode"),
        ("precision:\n  comparison_mode: fuzzy", "precision.comparison_mode must be 'absolute' or 'relative'"),
        ("limits:\n  time_budget_secs: -1", "limits.time_budget_secs must be > 0"),
        ("limits:\n  time_budget_secs: soon", "limits.time_budget_secs must be a number"),
        ("limits:\n  dense_max_qubits: 20", "limits.dense_max_qubits must be in [1, 14]"),
        ("limits:\n  max_qubits: 0", "limits.max_qubits must be >= 1"),
        ("report:\n  top_k: 0", "report.top_k must be >= 1"),
        ("report:\n  amplitude_digits: 31", "report.amplitude_digits must be in [1, 30]"),
        ("limits: 5", "limits must be a mapping"),
        ("- precision", "config root must be a mapping"),
    ],
)
def test_invalid_config_rejected(tmp_path, body, token):
    path = write_config(tmp_path, "bad.yaml", body)
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert token in str(info.value)


def test_invalid_yaml_and_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(write_config(tmp_path, "broken.yaml", "precision: [1, 2"))
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config(tmp_path / "absent.yaml")


def test_partial_sections_keep_other_defaults():
    cfg = parse_config({"limits": {"max_qubits": 40}})
    assert cfg.limits.max_qubits == 40
    assert cfg.limits.time_budget_secs == Limits().time_budget_secs
    assert cfg.precision == AppConfig().precision


def test_cli_overrides_then_environment():
    cfg = AppConfig().with_overrides(53, 1e-12, None, env={})
    assert cfg.precision.native and cfg.precision.merge_epsilon == 1e-12
    assert cfg.with_overrides(comparison_mode="absolute", env={}).precision.comparison_mode is ComparisonMode.ABSOLUTE
    budget = AppConfig().with_overrides(env={ENV_TIME_BUDGET: "30"})
    assert budget.limits.time_budget_secs == 30.0
    assert AppConfig().with_overrides(env={ENV_TIME_BUDGET: ""}) == AppConfig()


@pytest.mark.parametrize("value", ["abc", "0", "-5", "inf"])
def test_bad_environment_budget(value):
    with pytest.raises(ConfigError, match=ENV_TIME_BUDGET):
        AppConfig().with_overrides(env={ENV_TIME_BUDGET: value})


def test_bad_override_is_a_config_error():
    with pytest.raises(ConfigError):
        AppConfig().with_overrides(mantissa_bits=40, env={})


@pytest.mark.parametrize(
    "value, level",
    [
        (None, logging.WARNING),
        ("debug", logging.DEBUG),
        ("INFO", logging.INFO),
        ("error", logging.ERROR),
        ("none", None),
    ],
)
def test_log_level_resolution(value, level):
    env = {} if value is None else {ENV_LOG_LEVEL: value}
    assert resolve_level(env) == level


def test_unknown_log_level():
    with pytest.raises(ConfigError, match="debug|info|warn|error|none"):
        resolve_level({ENV_LOG_LEVEL: "loud"})


def test_setup_logging_replaces_handlers():
    setup_logging({ENV_LOG_LEVEL: "info"})
    setup_logging({ENV_LOG_LEVEL: "debug"})
    root = logging.getLogger("quidd_sim")
    assert len(root.handlers) == 1
    assert root.level == logging.DEBUG
    setup_logging({ENV_LOG_LEVEL: "none"})
    assert isinstance(root.handlers[0], logging.NullHandler)
