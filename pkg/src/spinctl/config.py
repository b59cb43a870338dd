"""Flat ``key = value`` experiment configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

EXPERIMENTS = ("convergence", "dynamics", "noise-compare")
SCHEMES = ("global", "local", "both")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "convergence"
    N: int = 3
    T: float = 2.0
    L: int = 8
    Jx: float = 1.0
    Jy: float = 1.0
    Jz: float = 0.2
    scheme: str = ""  # empty: "both", or "local" for dynamics
    realizations: int = 10
    seed: int = 0
    tol: float = 1e-4
    max_iters: int = 200
    fd_step: float = 1e-6
    threshold: float = 1e-2
    lambda_reg: float = 0.0
    C_bound: float = 3.0
    d_margin: float = 1.0
    global_init_halfwidth: float = 0.5
    local_bound: float = 2.0 * math.pi
    local_init_low: float = -0.5
    local_init_high: float = 0.5
    p: float = 1e-3
    workers: int = 1
    out: str = "results"

    def __post_init__(self):
        try:
            self.validate()
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.scheme and self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.experiment == "dynamics" and self.scheme == "both":
            raise ConfigError("dynamics runs a single scheme")
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{f.name} must be finite")
        checks = [
            (self.N >= 2, "N must be >= 2"),
            (self.T > 0, "T must be positive"),
            (self.L >= 1, "L must be >= 1"),
            (self.realizations >= 1, "realizations must be >= 1"),
            (self.tol > 0, "tol must be positive"),
            (self.max_iters >= 0, "max_iters must be >= 0"),
            (self.fd_step > 0, "fd_step must be positive"),
            (self.lambda_reg >= 0, "lambda_reg must be >= 0"),
            (0.0 <= self.p <= 1.0, "p must lie in [0, 1]"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.local_init_low < self.local_init_high, "local_init_low must be below local_init_high"),
            (self.local_bound >= max(abs(self.local_init_low), abs(self.local_init_high)),
             "local initialization range exceeds local_bound"),
            (self.global_init_halfwidth <= self.C_bound, "global_init_halfwidth exceeds C_bound"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        if "global" in self.schemes and self.L < 2:
            raise ConfigError("global scheme needs L >= 2")

    @property
    def schemes(self) -> tuple[str, ...]:
        scheme = self.scheme or ("local" if self.experiment == "dynamics" else "both")
        return ("local", "global") if scheme == "both" else (scheme,)

    def scheme_overrides(self, kind: str) -> dict:
        if kind == "global":
            return {"C_bound": self.C_bound, "d_margin": self.d_margin, "init_halfwidth": self.global_init_halfwidth}
        return {"bound": self.local_bound, "init_low": self.local_init_low, "init_high": self.local_init_high}

    def with_values(self, **raw) -> "ExperimentConfig":
        """Return a copy with string (or typed) values coerced per field."""
        return replace(self, **_coerce(raw))


FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _coerce(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        cast = _CASTS[FIELD_TYPES[key]]
        if isinstance(value, str):
            value = value.strip()
        try:
            out[key] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot read {value!r} as {FIELD_TYPES[key]}") from exc
    return out


def parse_config(text: str) -> dict[str, str]:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def load_config(path, **overrides) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw = parse_config(text)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**_coerce(raw))
