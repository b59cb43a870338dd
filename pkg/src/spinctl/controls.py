"""Control parameterizations: global harmonic profile and site-local fields.

Flat parameter layouts:

* global: ``[C_0 .. C_{L-1}, d_1 .. d_{L-2}]``; ``d_0 = di`` and
  ``d_{L-1} = df`` are anchored and not free.
* local: row-major ``theta[l, j]``, i.e. ``[theta_00 .. theta_0(N-1), theta_10, ...]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def harmonic_profile(C, d, j):
    """Site field ``C (j - d)^2 / 2`` of the global scheme."""
    return 0.5 * C * (j - d) ** 2


def _as_params(params, expected: int) -> np.ndarray:
    x = np.asarray(params, dtype=float)
    if x.ndim != 1 or x.size != expected:
        raise ValueError(f"expected {expected} parameters, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class GlobalScheme:
    L: int
    n_sites: int
    di: float = 0.0
    df: float | None = None
    C_bound: float = 3.0
    d_margin: float = 1.0
    init_halfwidth: float = 0.5

    name = "global"

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("global scheme needs L >= 2 (both endpoints are anchored)")
        if self.df is None:
            object.__setattr__(self, "df", float(self.n_sites - 1))

    @property
    def n_params(self) -> int:
        return 2 * self.L - 2

    def d_series(self, params) -> np.ndarray:
        x = _as_params(params, self.n_params)
        return np.concatenate(([self.di], x[self.L:], [self.df]))

    def unpack(self, params) -> np.ndarray:
        x = _as_params(params, self.n_params)
        C = x[: self.L]
        d = self.d_series(x)
        sites = np.arange(self.n_sites)
        return harmonic_profile(C[:, None], d[:, None], sites[None, :])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        n_int = self.L - 2
        lower = np.concatenate((np.full(self.L, -self.C_bound), np.full(n_int, self.di - self.d_margin)))
        upper = np.concatenate((np.full(self.L, self.C_bound), np.full(n_int, self.df + self.d_margin)))
        return lower, upper

    def initial_params(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        C = rng.uniform(-self.init_halfwidth, self.init_halfwidth, self.L)
        ell = np.arange(1, self.L - 1)
        ramp = self.di + ell * (self.df - self.di) / (self.L - 1)
        return np.concatenate((C, ramp))


@dataclass(frozen=True)
class LocalScheme:
    L: int
    n_sites: int
    bound: float = 2.0 * math.pi
    init_low: float = -0.5
    init_high: float = 0.5

    name = "local"

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")

    @property
    def n_params(self) -> int:
        return self.n_sites * self.L

    def unpack(self, params) -> np.ndarray:
        return _as_params(params, self.n_params).reshape(self.L, self.n_sites).copy()

    def pack(self, controls) -> np.ndarray:
        u = np.asarray(controls, dtype=float)
        if u.shape != (self.L, self.n_sites):
            raise ValueError(f"controls must have shape {(self.L, self.n_sites)}, got {u.shape}")
        return u.reshape(-1).copy()

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.n_params, -self.bound), np.full(self.n_params, self.bound)

    def initial_params(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.uniform(self.init_low, self.init_high, self.n_params)


Scheme = GlobalScheme | LocalScheme


def param_count(scheme: Scheme) -> int:
    return scheme.n_params


def make_scheme(kind: str, L: int, n_sites: int, **overrides) -> Scheme:
    if kind == "global":
        return GlobalScheme(L, n_sites, **overrides)
    if kind == "local":
        return LocalScheme(L, n_sites, **overrides)
    raise ValueError(f"unknown scheme {kind!r}")
