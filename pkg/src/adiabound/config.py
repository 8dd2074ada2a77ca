"""Run configuration: flat JSON document, overridable from the command line.

Precedence is flag > ``--set`` > file > default.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError
from .evolution import IntegratorConfig
from .model import DriveProtocol, ModelParams


@dataclass
class RunConfig:
    J: float = 0.4
    U: float = 0.4
    E_R: float = 1.0
    Gamma: float = 0.7
    N: int = 1000
    lambda_max: float = 1.5
    window: str = "fixed"
    grid_points: int = 2048
    base_steps: int = 2048
    tol: float = 1e-9
    max_halvings: int = 12
    threads: int = 1
    backend: str | None = None
    epsilon: float = 0.1
    seed: int = 42
    N_list: list = field(default_factory=lambda: [100, 1000, 10000])
    lemma_trials: int = 100_000
    decomposition_trials: int = 10_000
    out: str | None = None
    svg: str | None = None

    def model(self) -> ModelParams:
        return ModelParams(J=self.J, U=self.U, E_R=self.E_R, Gamma=self.Gamma, N=self.N)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(base_steps=self.base_steps, tol=self.tol,
                                max_halvings=self.max_halvings, threads=self.threads,
                                backend=self.backend)

    def effective_lambda_max(self) -> float:
        if self.window == "scaled":
            from .bounds import scaled_lambda_max

            return scaled_lambda_max(self.N)
        return self.lambda_max

    def protocol(self) -> DriveProtocol:
        return DriveProtocol.uniform(self.effective_lambda_max(), self.grid_points)

    def validate(self) -> "RunConfig":
        self.model()
        self.integrator()
        self.protocol()
        if self.window not in ("fixed", "scaled"):
            raise ConfigError("window must be 'fixed' or 'scaled'")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.N_list or any(int(n) != n or n < 1 for n in self.N_list):
            raise ConfigError("N_list must be a non-empty list of positive integers")
        if self.lemma_trials < 1 or self.decomposition_trials < 1:
            raise ConfigError("trial counts must be positive")
        if self.backend not in (None, "python", "cython"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        return self

    def as_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    try:
        if value is None:
            if "None" in kind:
                return None
            raise ConfigError(f"{key} may not be null")
        if kind == "float":
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if kind == "int":
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise TypeError
            return int(float(value))
        if kind == "list":
            if not isinstance(value, list):
                raise TypeError
            return [_coerce_int(key, v) for v in value]
        if kind.startswith("str"):
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def _coerce_int(key, v):
    if isinstance(v, bool) or float(v) != int(float(v)):
        raise ConfigError(f"bad entry in {key}: {v!r}")
    return int(float(v))


def parse_assignment(text: str) -> tuple[str, object]:
    """``key=value`` with the value read as JSON when possible."""
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def load_config(path: str | None = None, assignments=(), overrides: dict | None = None) -> RunConfig:
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        values.update(doc)
    for item in assignments:
        key, value = parse_assignment(item)
        values[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()
