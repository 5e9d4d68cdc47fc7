import math
import time

import numpy as np
import pytest
from scipy.optimize import rosen

from vqekit.optimizers import (
    NumericalDivergence,
    OptimizerOptions,
    OptimizerTimeout,
    get_optimizer,
    window_converged,
)

METHODS = ["nelder-mead", "powell", "bfgs"]


@pytest.mark.parametrize("method", METHODS)
def test_quadratic(method):
    out = get_optimizer(method)(lambda t: float((t[0] - 2.0) ** 2), np.zeros(1), OptimizerOptions(tolerance=1e-10))
    assert out.theta[0] == pytest.approx(2.0, abs=1e-4)
    assert out.value < 1e-8
    assert out.evaluations >= out.iterations


def test_rosenbrock_bfgs():
    out = get_optimizer("bfgs")(rosen, np.array([-1.2, 1.0]), OptimizerOptions(max_iterations=500, tolerance=1e-12))
    assert out.value < 1e-6


def test_noisy_nelder_mead_finishes():
    rng = np.random.default_rng(0)

    def f(t):
        return float(np.sum((t - 0.5) ** 2) + rng.normal(scale=1e-3))

    out = get_optimizer("nelder-mead")(f, np.zeros(3), OptimizerOptions(max_iterations=300, noisy=True))
    assert np.all(np.isfinite(out.theta)) and math.isfinite(out.value)
    assert out.value < 0.05


@pytest.mark.parametrize("method", METHODS)
def test_deadline(method):
    def slow(t):
        time.sleep(0.01)
        return float(np.sum(t ** 2))

    opts = OptimizerOptions(max_iterations=10_000, tolerance=0.0, deadline=time.monotonic() + 0.05)
    with pytest.raises(OptimizerTimeout) as err:
        get_optimizer(method)(slow, np.ones(3), opts)
    assert math.isfinite(err.value.best_value)


@pytest.mark.parametrize("method", METHODS)
def test_nan_detected(method):
    with pytest.raises(NumericalDivergence):
        get_optimizer(method)(lambda t: float("nan"), np.ones(2), OptimizerOptions())


def test_window_rule():
    assert not window_converged([1.0, 0.5], 1e-3)
    assert window_converged([1.0, 0.5, 0.5, 0.5, 0.5], 1e-3)
    assert not window_converged([1.0, 0.5, 0.5, 0.4, 0.4], 1e-3)


def test_unknown_optimizer():
    with pytest.raises(ValueError):
        get_optimizer("adam")
