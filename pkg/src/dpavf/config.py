"""Run configuration: `key = value` files merged with flag overrides.

Grammar: UTF-8 text, one `key = value` per line, `#` starts a comment,
blank lines ignored.  Unknown keys are rejected by name.  Flag overrides
(already-typed values) take precedence over file values; documented
defaults fill the rest.  Required keys: scenario, n, tau, T.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .grid import PhysParams
from .ordering import STRATEGIES
from .scenarios import get_scenario


class ConfigError(ValueError):
    """Raised for any malformed, missing or inconsistent configuration."""


_INT_KEYS = ("n", "dim", "seed", "workers", "record_stride", "snapshot_stride")
_FLOAT_KEYS = ("tau", "T", "a", "b", "kappa1", "kappa2", "mu", "gamma")
_STR_KEYS = ("scenario", "strategy", "executor", "out")
KNOWN_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS
REQUIRED_KEYS = ("scenario", "n", "tau", "T")


@dataclass
class RunConfig:
    scenario: str
    n: int
    tau: float
    T: float
    dim: int
    a: float
    b: float
    kappa1: float
    kappa2: float
    mu: float
    gamma: float
    strategy: str = "lexicographic-forward"
    seed: int = 0
    executor: str = "serial"
    workers: int = 1
    record_stride: int = 1
    snapshot_stride: int = 0
    out: str = "out"

    @property
    def params(self) -> PhysParams:
        return PhysParams(self.kappa1, self.kappa2, self.mu, self.gamma)


def _convert(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"invalid value for key {key}: {value!r}") from None


def read_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key: {key}")
        values[key] = _convert(key, raw)
    return values


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Merge file values, flag overrides and defaults into a RunConfig."""
    values = read_config_file(path) if path else {}
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key: {key}")
        values[key] = val
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key: {key}")

    scenario = get_scenario_checked(values["scenario"])
    defaults = {
        "dim": scenario.dimension, "a": scenario.a, "b": scenario.b,
        "kappa1": scenario.params.kappa1, "kappa2": scenario.params.kappa2,
        "mu": scenario.params.mu, "gamma": scenario.params.gamma,
        "workers": _env_workers(),
    }
    for key, val in defaults.items():
        values.setdefault(key, val)
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def get_scenario_checked(name: str):
    try:
        return get_scenario(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _env_workers() -> int:
    raw = os.environ.get("DPAVF_WORKERS")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"invalid DPAVF_WORKERS value {raw!r}") from None


def _validate(cfg: RunConfig) -> None:
    for key in _FLOAT_KEYS:
        if not math.isfinite(getattr(cfg, key)):
            raise ConfigError(f"key {key} must be finite, got {getattr(cfg, key)}")
    if cfg.tau <= 0:
        raise ConfigError(f"key tau must be positive, got {cfg.tau}")
    if cfg.T <= 0:
        raise ConfigError(f"key T must be positive, got {cfg.T}")
    if cfg.n < 3:
        raise ConfigError(f"key n must be >= 3, got {cfg.n}")
    if not cfg.b > cfg.a:
        raise ConfigError(f"need b > a, got a={cfg.a}, b={cfg.b}")
    if cfg.dim != get_scenario_checked(cfg.scenario).dimension:
        raise ConfigError(
            f"key dim={cfg.dim} conflicts with scenario {cfg.scenario!r} "
            f"({get_scenario_checked(cfg.scenario).dimension}D)")
    if cfg.strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {cfg.strategy!r}; "
                          f"known: {', '.join(STRATEGIES)}")
    if cfg.strategy == "checkerboard" and cfg.n % 2 != 0:
        raise ConfigError(
            f"strategy checkerboard requires even n (index-parity 2-coloring "
            f"must be consistent under periodic wrap), got n={cfg.n}")
    if cfg.executor not in ("serial", "phased"):
        raise ConfigError(f"key executor must be serial or phased, got "
                          f"{cfg.executor!r}")
    if cfg.workers < 1:
        raise ConfigError(f"key workers must be >= 1, got {cfg.workers}")
    if cfg.record_stride < 1:
        raise ConfigError(f"key record_stride must be >= 1, got {cfg.record_stride}")
    if cfg.snapshot_stride < 0:
        raise ConfigError(f"key snapshot_stride must be >= 0, got "
                          f"{cfg.snapshot_stride}")
