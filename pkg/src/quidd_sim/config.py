"""YAML run configuration with strict key validation.

Precedence: built-in defaults < config file < CLI flags < environment.
Every problem is reported as a `ConfigError` naming the dotted key.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError
from .numerics import ComparisonMode, PrecisionConfig

logger = logging.getLogger(__name__)

ENV_TIME_BUDGET = "QUIDD_TIME_BUDGET_SECS"

MAX_DENSE_QUBITS = 14
MAX_AMPLITUDE_DIGITS = 30

_SECTIONS = ("precision", "limits", "report")
_KEYS = {
    "precision": ("mantissa_bits", "merge_epsilon", "comparison_mode"),
    "limits": ("time_budget_secs", "dense_max_qubits", "max_qubits"),
    "report": ("top_k", "amplitude_digits"),
}
_REMOVED = {
    ("precision", "epsilon"): "precision.epsilon is no longer supported; use precision.merge_epsilon",
    ("limits", "iteration_cap"): "limits.iteration_cap is no longer supported; use limits.time_budget_secs",
}


@dataclass(frozen=True)
class Limits:
    time_budget_secs: float = 600.0
    dense_max_qubits: int = MAX_DENSE_QUBITS
    max_qubits: int = 128


@dataclass(frozen=True)
class ReportSettings:
    top_k: int = 8
    amplitude_digits: int = 6


@dataclass(frozen=True)
class AppConfig:
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    limits: Limits = field(default_factory=Limits)
    report: ReportSettings = field(default_factory=ReportSettings)

    def with_overrides(
        self,
        mantissa_bits: int | None = None,
        merge_epsilon: float | None = None,
        comparison_mode: str | None = None,
        env: Mapping[str, str] | None = None,
    ) -> "AppConfig":
        """Apply CLI flags, then environment variables."""
        cfg = self
        changes: dict[str, Any] = {}
        if mantissa_bits is not None:
            changes["mantissa_bits"] = mantissa_bits
        if merge_epsilon is not None:
            changes["merge_epsilon"] = merge_epsilon
        if comparison_mode is not None:
            changes["comparison_mode"] = comparison_mode
        if changes:
            cfg = replace(cfg, precision=replace(cfg.precision, **changes))
        env = os.environ if env is None else env
        budget = env.get(ENV_TIME_BUDGET)
        if budget:
            try:
                secs = float(budget)
            except ValueError:
                raise ConfigError(f"{ENV_TIME_BUDGET} must be a number of seconds, got {budget!r}") from None
            cfg = replace(cfg, limits=replace(cfg.limits, time_budget_secs=_positive(secs, ENV_TIME_BUDGET)))
        return cfg


def load_config(path: str | Path | None) -> AppConfig:
    """Load and validate a config file; None gives the defaults."""
    if path is None:
        return AppConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    cfg = parse_config(data)
    logger.debug("loaded config %s: %s", path, cfg.precision.describe())
    return cfg


def parse_config(data: Any) -> AppConfig:
    if data is None:
        return AppConfig()
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    for key in data:
        if key not in _SECTIONS:
            raise ConfigError(f"Unknown top-level key: '{key}'")
    sections = {}
    for name in _SECTIONS:
        body = data.get(name) or {}
        if not isinstance(body, dict):
            raise ConfigError(f"{name} must be a mapping")
        for key in body:
            if (name, key) in _REMOVED:
                raise ConfigError(_REMOVED[(name, key)])
            if key not in _KEYS[name]:
                raise ConfigError(f"Unknown {name} key: '{key}'")
        sections[name] = body
    return AppConfig(
        precision=_precision(sections["precision"]),
        limits=_limits(sections["limits"]),
        report=_report(sections["report"]),
    )


def _precision(body: dict[str, Any]) -> PrecisionConfig:
    defaults = PrecisionConfig()
    mode = body.get("comparison_mode", defaults.comparison_mode.value)
    if mode not in {m.value for m in ComparisonMode}:
        raise ConfigError(f"precision.comparison_mode must be 'absolute' or 'relative', got {mode!r}")
    epsilon = body.get("merge_epsilon", defaults.merge_epsilon)
    if isinstance(epsilon, int) and not isinstance(epsilon, bool):
        epsilon = float(epsilon)
    return PrecisionConfig(
        mantissa_bits=_integer(body.get("mantissa_bits", defaults.mantissa_bits), "precision.mantissa_bits"),
        merge_epsilon=epsilon,
        comparison_mode=ComparisonMode(mode),
    )


def _limits(body: dict[str, Any]) -> Limits:
    defaults = Limits()
    budget = body.get("time_budget_secs", defaults.time_budget_secs)
    if isinstance(budget, bool) or not isinstance(budget, (int, float)):
        raise ConfigError(f"limits.time_budget_secs must be a number, got {budget!r}")
    dense = _integer(body.get("dense_max_qubits", defaults.dense_max_qubits), "limits.dense_max_qubits")
    if not 1 <= dense <= MAX_DENSE_QUBITS:
        raise ConfigError(f"limits.dense_max_qubits must be in [1, {MAX_DENSE_QUBITS}], got {dense}")
    widest = _integer(body.get("max_qubits", defaults.max_qubits), "limits.max_qubits")
    if widest < 1:
        raise ConfigError(f"limits.max_qubits must be >= 1, got {widest}")
    return Limits(_positive(float(budget), "limits.time_budget_secs"), dense, widest)


def _report(body: dict[str, Any]) -> ReportSettings:
    defaults = ReportSettings()
    top_k = _integer(body.get("top_k", defaults.top_k), "report.top_k")
    if top_k < 1:
        raise ConfigError(f"report.top_k must be >= 1, got {top_k}")
    digits = _integer(body.get("amplitude_digits", defaults.amplitude_digits), "report.amplitude_digits")
    if not 1 <= digits <= MAX_AMPLITUDE_DIGITS:
        raise ConfigError(f"report.amplitude_digits must be in [1, {MAX_AMPLITUDE_DIGITS}], got {digits}")
    return ReportSettings(top_k, digits)


def _integer(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _positive(value: float, key: str) -> float:
    if not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{key} must be > 0, got {value}")
    return value
