"""Classical optimizers for the variational loop.

The line-search and simplex machinery is scipy's; this module adds the
bookkeeping the driver needs: an accepted-energy trace, a three-step
``|dE| <= tol`` convergence window, a cooperative wall-clock deadline and
NaN detection.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

OPTIMIZERS = ("nelder_mead", "powell", "bfgs")
WINDOW = 3
# Nelder-Mead simplex edge in radians; scipy's default for a zero start is 2.5e-4,
# which shot noise swamps
SIMPLEX_STEP = 0.1


class OptimizerTimeout(TimeoutError):
    """The wall-clock budget ran out between objective evaluations."""

    def __init__(self, message: str, best_theta=None, best_value=math.inf):
        super().__init__(message)
        self.best_theta = best_theta
        self.best_value = best_value


class NumericalDivergence(ArithmeticError):
    def __init__(self, theta):
        super().__init__(f"objective returned NaN at theta={np.array2string(np.asarray(theta), precision=6)}")
        self.theta = np.asarray(theta)


@dataclass
class OptimizerOptions:
    max_iterations: int = 200
    tolerance: float = 1e-6
    deadline: float | None = None  # absolute time.monotonic() value
    gradient: Callable | None = None
    noisy: bool = False


@dataclass
class OptimizeOutcome:
    theta: np.ndarray
    value: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)
    evaluations: int = 0
    message: str = ""


def window_converged(trace: Sequence[float], tol: float, window: int = WINDOW) -> bool:
    """True when the last ``window`` accepted steps all changed the energy by at most ``tol``."""
    if len(trace) < window + 1:
        return False
    tail = np.asarray(trace[-(window + 1):])
    return bool(np.all(np.abs(np.diff(tail)) <= tol))


class _Tracked:
    """Objective wrapper: deadline, NaN guard, evaluation memo and best-so-far."""

    def __init__(self, fun, deadline):
        self.fun = fun
        self.deadline = deadline
        self.evaluations = 0
        self.best_value = math.inf
        self.best_theta = None
        self.last = {}

    def __call__(self, theta):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise OptimizerTimeout("optimizer deadline exceeded", self.best_theta, self.best_value)
        theta = np.array(theta, dtype=float)
        value = float(self.fun(theta))
        self.evaluations += 1
        if math.isnan(value):
            raise NumericalDivergence(theta)
        self.last = {theta.tobytes(): value}
        if value < self.best_value:
            self.best_value, self.best_theta = value, theta.copy()
        return value

    def value_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        hit = self.last.get(theta.tobytes())
        return hit if hit is not None else self(theta)


def _minimize(method, tracked, theta0, callback, opts, max_iterations):
    if method == "nelder_mead":
        simplex = np.vstack([theta0, theta0 + SIMPLEX_STEP * np.eye(theta0.size)])
        return optimize.minimize(tracked, theta0, method="Nelder-Mead", callback=callback,
                                 options={"maxiter": max_iterations, "xatol": 1e-8, "initial_simplex": simplex,
                                          "fatol": 0.1 * opts.tolerance, "adaptive": theta0.size > 4})
    if method == "powell":
        return optimize.minimize(tracked, theta0, method="Powell", callback=callback,
                                 options={"maxiter": max_iterations, "xtol": 1e-6,
                                          "ftol": 1e-3 * opts.tolerance})
    if method == "bfgs":
        gtol = 1e-3 if opts.noisy else 1e-7
        return optimize.minimize(tracked, theta0, method="BFGS", jac=opts.gradient, callback=callback,
                                 options={"maxiter": max_iterations, "gtol": gtol})
    raise ValueError(f"unknown optimizer {method!r}; expected one of {OPTIMIZERS}")


def _run(method: str, fun, theta0, opts: OptimizerOptions, max_restarts: int = 3) -> OptimizeOutcome:
    """Minimize, restarting from the result until the convergence window is filled.

    Restarting Powell or Nelder-Mead from its own fixed point resets the
    direction set or simplex. A restart that makes no progress confirms the
    minimum and is recorded as a zero-length step.
    """
    theta = np.asarray(theta0, dtype=float).reshape(-1)
    tracked = _Tracked(fun, opts.deadline)
    trace = [tracked(theta)]
    if theta.size == 0:
        return OptimizeOutcome(theta, trace[0], 0, True, trace, tracked.evaluations, "no parameters")
    state = {"iterations": 0, "early": False}

    def callback(xk, *args):
        state["iterations"] += 1
        trace.append(tracked.value_at(xk))
        if opts.deadline is not None and time.monotonic() > opts.deadline:
            raise OptimizerTimeout("optimizer deadline exceeded", tracked.best_theta, tracked.best_value)
        if method == "bfgs" and not opts.noisy and window_converged(trace, opts.tolerance):
            state["early"] = True
            raise StopIteration

    converged = False
    message = ""
    value = trace[0]
    for _ in range(max_restarts + 1):
        before = state["iterations"]
        budget = opts.max_iterations - before
        if budget <= 0:
            break
        res = _minimize(method, tracked, theta, callback, opts, budget)
        message = str(res.message)
        theta, value = np.asarray(res.x, dtype=float), float(res.fun)
        if not opts.noisy and tracked.best_value < value:
            # deterministic objective: never report worse than an evaluated point
            theta, value = tracked.best_theta.copy(), tracked.best_value
        if trace[-1] != value:
            trace.append(value)
        ok = bool(res.success) or state["early"]
        if not ok or opts.noisy:
            converged = ok
            break
        if window_converged(trace, opts.tolerance) or state["early"]:
            converged = True
            break
        if state["iterations"] == before:
            # a restart that cannot move is recorded as one zero-length accepted step
            state["iterations"] += 1
            trace.append(value)
            if window_converged(trace, opts.tolerance):
                converged = True
                break
    return OptimizeOutcome(theta, value, state["iterations"], converged, trace, tracked.evaluations, message)


def nelder_mead(fun, theta0, opts: OptimizerOptions | None = None) -> OptimizeOutcome:
    return _run("nelder_mead", fun, theta0, opts or OptimizerOptions())


def powell(fun, theta0, opts: OptimizerOptions | None = None) -> OptimizeOutcome:
    return _run("powell", fun, theta0, opts or OptimizerOptions())


def bfgs(fun, theta0, opts: OptimizerOptions | None = None) -> OptimizeOutcome:
    """Quasi-Newton; ``opts.gradient`` supplies analytic gradients (finite differences otherwise)."""
    return _run("bfgs", fun, theta0, opts or OptimizerOptions())


def get_optimizer(name: str):
    key = name.lower().replace("-", "_")
    table = {"nelder_mead": nelder_mead, "powell": powell, "bfgs": bfgs}
    if key not in table:
        raise ValueError(f"unknown optimizer {name!r}; expected one of {OPTIMIZERS}")
    return table[key]
