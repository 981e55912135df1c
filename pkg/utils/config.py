"""
Environment-backed settings.

Values come from the process environment, optionally seeded from a `.env`
file in the working directory. Nothing is required; every key has a default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

from models.errors import ConfigError

load_dotenv()


def _default_data_dir() -> str:
    base_dir = os.path.dirname(os.path.dirname(__file__))
    return os.path.join(base_dir, "data")


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Settings:
    """
    Runtime settings.

    Attributes:
        enumeration_cap: Largest customer count the exact oracle accepts
        log_level: Root logging level name
        data_dir: Directory holding fixtures, presets and results
        default_iterations: Default --iters for search commands
        default_restarts: Default --restarts for search commands
        run_slow: Whether full-scale statistical tests should run
    """

    enumeration_cap: int
    log_level: str
    data_dir: str
    default_iterations: int
    default_restarts: int
    run_slow: bool


def get_settings() -> Settings:
    """Read settings from the environment (re-read on every call)."""
    cap = _int_env("NRP_ENUMERATION_CAP", 25)
    if cap < 0:
        raise ConfigError("NRP_ENUMERATION_CAP must be non-negative")

    return Settings(
        enumeration_cap=cap,
        log_level=os.getenv("NRP_LOG_LEVEL", "INFO").upper(),
        data_dir=os.getenv("NRP_DATA_DIR", _default_data_dir()),
        default_iterations=_int_env("NRP_DEFAULT_ITERATIONS", 1000),
        default_restarts=_int_env("NRP_DEFAULT_RESTARTS", 10),
        run_slow=os.getenv("NRP_RUN_SLOW", "0").lower() in ("1", "true", "yes"),
    )
