"""Run configuration: a flat ``key = value`` document with ``#`` comments."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

SCENARIOS = ("theorem1", "claim1-forward", "claim1-converse", "bravyi", "lightcone", "bounds-sweep")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "theorem1"
    d_A: int = 2
    d_B: int = 2
    env_dim: int = 4
    # sizes drawn uniformly per instance, e.g. ``ensemble_size = 2,3,4``
    ensemble_size: tuple = (2,)
    n_instances: int = 100
    fixture: str = "none"
    # spin chain
    n_sites: int = 8
    J: float = 1.0
    g: float = 1.0
    boundary: str = "open"
    o_a: str = "Z"
    o_b: str = "Z"
    encoding: str = "X"
    t_min: float = 0.0
    t_max: float = 1.0
    n_times: int = 11
    probe_t: float = 0.1
    # optimizer
    restarts: int = 4
    max_iters: int = 400
    init_step: float = 0.5
    shrink: float = 0.5
    opt_tol: float = 1e-7
    seed: int = 0
    # assertion tolerances
    tol: float = 1e-9
    product_tol: float = 1e-8
    witness_threshold: float = 1e-6
    witness_rate: float = 0.95
    bravyi_slack: float = 1e-6
    bravyi_rate: float = 0.99
    # output
    units: str = "nats"
    output: str = ""
    format: str = "csv"

    def __post_init__(self):
        _validate(self)

    def echo(self) -> dict:
        out = dataclasses.asdict(self)
        out["ensemble_size"] = list(self.ensemble_size)
        return out


_RANGES = {
    "d_A": (1, 16),
    "d_B": (1, 16),
    "env_dim": (1, 64),
    "n_instances": (1, 100000),
    "n_sites": (2, 10),
    "n_times": (1, 10000),
    "restarts": (1, 1000),
    "max_iters": (1, 100000),
}

_CHOICES = {
    "scenario": SCENARIOS,
    "fixture": ("none", "orthogonal-pair"),
    "boundary": ("open", "periodic"),
    "o_a": ("X", "Y", "Z"),
    "o_b": ("X", "Y", "Z"),
    "encoding": ("X", "Y", "Z"),
    "units": ("nats", "bits"),
    "format": ("csv", "json"),
}


def _validate(cfg: RunConfig) -> None:
    for key, choices in _CHOICES.items():
        if getattr(cfg, key) not in choices:
            raise ConfigError(f"{key}: {getattr(cfg, key)!r} is not one of {', '.join(choices)}")
    for key, (lo, hi) in _RANGES.items():
        v = getattr(cfg, key)
        if not lo <= v <= hi:
            raise ConfigError(f"{key}: {v} outside [{lo}, {hi}]")
    if not cfg.ensemble_size or any(not 1 <= m <= 64 for m in cfg.ensemble_size):
        raise ConfigError(f"ensemble_size: {cfg.ensemble_size} must list sizes in [1, 64]")
    if cfg.t_max < cfg.t_min:
        raise ConfigError("t_max: must be >= t_min")
    if cfg.init_step <= 0 or cfg.opt_tol <= 0 or not 0 < cfg.shrink < 1:
        raise ConfigError("optimizer: need init_step > 0, opt_tol > 0, 0 < shrink < 1")
    for key in ("tol", "product_tol", "witness_threshold", "bravyi_slack"):
        if getattr(cfg, key) <= 0:
            raise ConfigError(f"{key}: must be > 0")
    for key in ("witness_rate", "bravyi_rate"):
        if not 0 <= getattr(cfg, key) <= 1:
            raise ConfigError(f"{key}: must lie in [0, 1]")
    if cfg.seed < 0:
        raise ConfigError("seed: must be >= 0")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(key: str, raw: str, lineno: int | None = None):
    where = f"line {lineno}: " if lineno is not None else ""
    default = _FIELDS[key].default
    try:
        if key == "ensemble_size":
            return tuple(int(v) for v in raw.split(","))
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{where}{key}: cannot parse {raw!r}") from None
    return raw


def parse_config(text: str, **overrides) -> RunConfig:
    """Parse a ``key = value`` document; unknown keys and bad values are rejected.

    Keyword ``overrides`` (already typed or raw strings) win over the document.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw, lineno)
    for key, v in overrides.items():
        if v is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, v) if isinstance(v, str) else v
    return RunConfig(**values)
