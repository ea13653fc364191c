"""Flat ``key = value`` experiment configuration.

Vectors are comma-separated, blank lines and ``#`` comments are ignored.
``dump`` writes every field, so a dumped config re-parses to the same run.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields

from .rng import check_seed

THREADS_ENV = "STEIN_DECOMP_THREADS"


class ConfigError(ValueError):
    pass


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


@dataclass
class ExperimentConfig:
    # graph model: either (n, m) for a circulant graph or an edge-list path
    n: int | None = None
    m: int | None = None
    d: int | None = None
    pi: tuple | None = None
    edges: str | None = None
    # generic dependency model file with its summand bound
    model: str | None = None
    beta: float | None = None
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    family: str = "default"
    sweep: tuple | None = None
    sweep_offsets: bool = False
    C: float = 1.0
    cd: float | None = None
    out: str | None = None
    format: str | None = None
    quick: bool = False
    summary: bool = False
    input: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        try:
            self.seed = check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"seed: {exc}") from None
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.sweep is not None:
            if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
                raise ConfigError(f"sweep values must be strictly increasing, got {list(self.sweep)}")
        for name in ("C", "cd", "beta"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.format not in (None, "csv", "json", "text"):
            raise ConfigError(f"format must be csv, json or text, got {self.format!r}")
        if self.pi is not None and self.d is not None and len(self.pi) != self.d:
            raise ConfigError(f"pi has {len(self.pi)} entries but d={self.d}")
        return self


_INT = {"n", "m", "d", "samples", "seed", "workers"}
_FLOAT = {"beta", "C", "cd"}
_BOOL = {"sweep_offsets", "quick", "summary"}
_FLOAT_VEC = {"pi"}
_INT_VEC = {"sweep"}


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def convert(key: str, text: str):
    """Parse one value as written in a config file or on the command line."""
    text = text.strip()
    if text in ("", "none"):
        return None
    try:
        if key in _INT:
            return int(text)
        if key in _FLOAT:
            return float(text)
        if key in _BOOL:
            return _bool(text)
        if key in _FLOAT_VEC:
            return tuple(float(x) for x in text.split(","))
        if key in _INT_VEC:
            return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    return text


def parse(text: str) -> dict:
    """Key/value pairs present in a config file (unset keys are omitted)."""
    names = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in names:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = convert(key, value)
    return out


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ",".join(_format(v) for v in value)
    return str(value)


def dump(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {_format(v)}\n" for k, v in dataclasses.asdict(cfg).items())


def load(text: str) -> ExperimentConfig:
    return ExperimentConfig(**parse(text)).validate()
