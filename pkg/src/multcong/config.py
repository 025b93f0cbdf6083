"""Run configuration: documented defaults, strict key-value config files."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import EngineConfig


class ConfigError(ValueError):
    """Bad config file or flag combination; message carries line context."""


DEFAULTS = {
    "horizon": 100_000,
    "exponent_horizon": 64,
    "witness_budget": 25,
    "candidate_bound": 1_000_000,
    "jobs": 1,
    "format": "json",
    "output": "",
    "cache_dir": "",
    "backend": "",
}

_INT_KEYS = {"horizon", "exponent_horizon", "witness_budget", "candidate_bound", "jobs"}
_STR_KEYS = {"format", "output", "cache_dir", "backend"}


@dataclass(frozen=True)
class RunConfig:
    horizon: int = DEFAULTS["horizon"]
    exponent_horizon: int = DEFAULTS["exponent_horizon"]
    witness_budget: int = DEFAULTS["witness_budget"]
    candidate_bound: int = DEFAULTS["candidate_bound"]
    jobs: int = DEFAULTS["jobs"]
    format: str = DEFAULTS["format"]
    output: str = DEFAULTS["output"]
    cache_dir: str = DEFAULTS["cache_dir"]
    backend: str = DEFAULTS["backend"]

    def __post_init__(self):
        for name in ("horizon", "exponent_horizon", "witness_budget",
                     "candidate_bound", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.backend not in ("", "numba", "numpy"):
            raise ConfigError(f"backend must be numba or numpy, got {self.backend!r}")

    def engine(self) -> EngineConfig:
        return EngineConfig(
            horizon=self.horizon,
            exponent_horizon=self.exponent_horizon,
            witness_budget=self.witness_budget,
            candidate_bound=self.candidate_bound,
            jobs=self.jobs,
            backend=self.backend or None,
        )


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Strict `key = value` parser: unknown keys and bad types are fatal,
    with the offending line number in the message."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: {key} needs an integer, got {val!r}") from None
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
    return values


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then config file values, then explicit flag overrides."""
    merged = dict(DEFAULTS)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        merged.update(parse_config_text(text, source=path))
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in merged:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = val
    return RunConfig(**merged)
