"""stderr logging for the command-line front end."""

from __future__ import annotations

import logging
import os
import sys
from typing import Mapping

from .errors import ConfigError

ENV_LOG_LEVEL = "QUIDD_LOG_LEVEL"

LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warn": logging.WARNING,
    "error": logging.ERROR,
}


def resolve_level(env: Mapping[str, str] | None = None) -> int | None:
    """Level named by QUIDD_LOG_LEVEL; None for 'none'."""
    env = os.environ if env is None else env
    name = env.get(ENV_LOG_LEVEL, "warn").strip().lower() or "warn"
    if name == "none":
        return None
    if name not in LEVELS:
        raise ConfigError(f"{ENV_LOG_LEVEL} must be one of debug|info|warn|error|none, got {name!r}")
    return LEVELS[name]


def setup_logging(env: Mapping[str, str] | None = None) -> None:
    level = resolve_level(env)
    root = logging.getLogger("quidd_sim")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.propagate = False
    if level is None:
        root.addHandler(logging.NullHandler())
        root.setLevel(logging.CRITICAL + 1)
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
