"""Box-constrained descent with finite-difference gradients.

The solver is sequential quadratic programming specialised to bound
constraints: a damped-BFGS model of the Hessian is minimized over the box
each iteration, and the resulting step is accepted only under the Armijo
sufficient-decrease test. Every objective call is recorded so convergence
can be read off per function evaluation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
MIN_STEP = 1e-10
MAX_BACKTRACKS = 30


@dataclass(frozen=True)
class StopRule:
    tol: float = 1e-4
    max_iters: int = 200

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass
class OptTrace:
    evals: list[float] = field(default_factory=list)
    accepted: list[float] = field(default_factory=list)
    x: np.ndarray | None = None
    fun: float = float("nan")
    fidelity: float = float("nan")
    n_iters: int = 0
    converged: bool = False
    reason: str = ""

    @property
    def n_evals(self) -> int:
        return len(self.evals)


def fd_gradient(f: Callable, x, h: float = 1e-6, lower=None, upper=None, f0: float | None = None) -> np.ndarray:
    """Central differences with step ``h * max(1, |x_i|)``.

    Coordinates whose central stencil would leave ``[lower, upper]`` fall
    back to a one-sided difference pointing into the box; ``f0`` (the value
    at ``x``) is evaluated lazily only when needed.
    """
    x = np.asarray(x, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    lower = np.full(x.shape, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(x.shape, np.inf) if upper is None else np.asarray(upper, dtype=float)
    steps = h * np.maximum(1.0, np.abs(x))
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = steps[i]
        xp = x.copy()
        xm = x.copy()
        if x[i] + hi > upper[i]:
            if f0 is None:
                f0 = f(x)
            xm[i] = x[i] - hi
            grad[i] = (f0 - f(xm)) / hi
        elif x[i] - hi < lower[i]:
            if f0 is None:
                f0 = f(x)
            xp[i] = x[i] + hi
            grad[i] = (f(xp) - f0) / hi
        else:
            xp[i] = x[i] + hi
            xm[i] = x[i] - hi
            grad[i] = (f(xp) - f(xm)) / (2.0 * hi)
        if not np.isfinite(grad[i]):
            raise FloatingPointError(f"non-finite objective near coordinate {i}")
    return grad


def solve_box_qp(B: np.ndarray, g: np.ndarray, lo: np.ndarray, hi: np.ndarray, max_iter: int | None = None) -> np.ndarray:
    """Minimize ``g.d + d.B.d / 2`` subject to ``lo <= d <= hi`` (B positive definite).

    Primal active-set method started from ``d = 0``, which must be feasible.
    """
    n = g.size
    d = np.zeros(n)
    # working set: -1 fixed at lo, +1 fixed at hi, 0 free
    work = np.zeros(n, dtype=int)
    work[(lo >= 0) & (g > 0)] = -1
    work[(hi <= 0) & (g < 0)] = 1
    d[work == -1] = lo[work == -1]
    d[work == 1] = hi[work == 1]
    for _ in range(max_iter or 10 * n + 10):
        free = work == 0
        target = d.copy()
        if np.any(free):
            fixed = ~free
            rhs = -(g[free] + B[np.ix_(free, fixed)] @ d[fixed])
            target[free] = np.linalg.solve(B[np.ix_(free, free)], rhs)
        step = target - d
        with np.errstate(divide="ignore", invalid="ignore"):
            t_hi = np.where(step > 0, (hi - d) / step, np.inf)
            t_lo = np.where(step < 0, (lo - d) / step, np.inf)
        t_bound = np.minimum(t_hi, t_lo)
        t_bound[~free] = np.inf
        j = int(np.argmin(t_bound))
        if t_bound[j] < 1.0:
            d = d + t_bound[j] * step
            work[j] = 1 if step[j] > 0 else -1
            d[j] = hi[j] if work[j] == 1 else lo[j]
            continue
        d = target
        lam = g + B @ d
        # a bound is correctly active when the gradient pushes outward
        wrong = np.where(work == -1, -lam, 0.0) + np.where(work == 1, lam, 0.0)
        k = int(np.argmax(wrong))
        if wrong[k] <= 1e-14:
            break
        work[k] = 0
    return np.clip(d, lo, hi)


def _damped_bfgs(B: np.ndarray, s: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Powell-damped BFGS update of a Hessian estimate; keeps B positive definite."""
    Bs = B @ s
    sBs = s @ Bs
    sy = s @ y
    if sBs <= 0:
        return B
    if sy < 0.2 * sBs:
        theta = 0.8 * sBs / (sBs - sy)
        y = theta * y + (1.0 - theta) * Bs
        sy = s @ y
    return B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / sy


def minimize(fun: Callable, x0, bounds, stop: StopRule = StopRule(), fd_step: float = 1e-6) -> OptTrace:
    """Minimize ``fun`` over the box ``bounds = (lower, upper)``.

    Each iteration solves the bound-constrained quadratic model exactly,
    then backtracks along the (always feasible) step until the Armijo test
    holds. Stops when the accepted objective changes by less than
    ``stop.tol``, drops below ``stop.tol``, the model step vanishes, or
    the iteration budget runs out (then ``converged`` is False).
    """
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != lower.shape or x.shape != upper.shape:
        raise ValueError("x0 and bounds differ in shape")
    if np.any(lower > upper):
        raise ValueError("empty box: lower > upper")
    if not np.all(np.isfinite(x)) or np.any(x < lower) or np.any(x > upper):
        raise ValueError("x0 is not inside the bounds")

    trace = OptTrace()

    def f(z):
        value = float(fun(z))
        if not np.isfinite(value):
            raise FloatingPointError("objective returned a non-finite value")
        trace.evals.append(value)
        return value

    fx = f(x)
    trace.accepted.append(fx)
    trace.reason = "iteration budget exhausted"
    n = x.size
    B = None
    g = None

    for _ in range(stop.max_iters):
        if fx < stop.tol:
            trace.converged, trace.reason = True, "objective below tolerance"
            break
        if g is None:
            g = fd_gradient(f, x, fd_step, lower, upper, f0=fx)
        trace.n_iters += 1
        if B is None:
            # first model step has unit length
            B = np.eye(n) * max(np.linalg.norm(g), 1e-8)

        d = solve_box_qp(B, g, lower - x, upper - x)
        slope = g @ d
        if np.max(np.abs(d)) < 1e-12 or slope >= 0:
            trace.converged, trace.reason = True, "model step vanished"
            break

        alpha = 1.0
        for _ in range(MAX_BACKTRACKS):
            x_new = np.clip(x + alpha * d, lower, upper)
            f_new = f(x_new)
            if f_new <= fx + ARMIJO_C1 * alpha * slope:
                break
            # safeguarded quadratic interpolation
            denom = 2.0 * (f_new - fx - alpha * slope)
            trial = -slope * alpha * alpha / denom if denom > 0 else 0.5 * alpha
            alpha = min(0.5 * alpha, max(0.1 * alpha, trial))
            if alpha < MIN_STEP:
                break
        if f_new > fx + ARMIJO_C1 * alpha * slope:
            trace.reason = "line search failed"
            break

        s = x_new - x
        f_old = fx
        x, fx = x_new, f_new
        trace.accepted.append(fx)
        if abs(f_old - fx) < stop.tol or fx < stop.tol:
            trace.converged, trace.reason = True, "objective change below tolerance"
            break

        g_new = fd_gradient(f, x, fd_step, lower, upper, f0=fx)
        B = _damped_bfgs(B, s, g_new - g)
        g = g_new

    trace.x = x
    trace.fun = fx
    logger.debug("minimize: %s after %d iters, %d evals, f=%.3e", trace.reason, trace.n_iters, trace.n_evals, fx)
    return trace


def optimize(spec, x0, stop: StopRule = StopRule(), fd_step: float = 1e-6) -> OptTrace:
    """Run :func:`minimize` on an ObjectiveSpec within its scheme's bounds."""
    trace = minimize(spec, x0, spec.scheme.bounds(), stop, fd_step)
    trace.fidelity = spec.fidelity(trace.x)
    return trace


def pad_traces(traces: list[OptTrace]) -> np.ndarray:
    """Stack per-evaluation traces, carrying each one's last value forward."""
    if not traces:
        raise ValueError("no traces given")
    length = max(t.n_evals for t in traces)
    out = np.empty((len(traces), length))
    for row, t in zip(out, traces):
        row[: t.n_evals] = t.evals
        row[t.n_evals:] = t.evals[-1]
    return out


def time_to_threshold(traces: list[OptTrace], eps: float = 1e-2) -> int | None:
    """First evaluation index where the mean objective drops below ``eps``."""
    mean = pad_traces(traces).mean(axis=0)
    hits = np.flatnonzero(mean < eps)
    return int(hits[0]) if hits.size else None


def eval_cost_check(trace: OptTrace, d: int, c: int = 4) -> dict:
    """Compare evaluation count with the ``n_iters * (2d + c)`` budget."""
    budget = max(1, trace.n_iters * (2 * d + c))
    per_iter = (trace.n_evals - 1) / trace.n_iters if trace.n_iters else 0.0
    return {
        "n_evals": trace.n_evals,
        "n_iters": trace.n_iters,
        "budget": budget,
        "evals_per_iter": per_iter,
        "ok": trace.n_evals <= budget,
    }
