"""Minimizer behavior on analytic objectives."""

import numpy as np
import pytest

from vqcbench.optimizers import (
    OptimizerConfig,
    gradient_descent_minimize,
    nelder_mead_minimize,
    powell_minimize,
    spsa_minimize,
)


def quad1(x):
    return (x[0] - 3.0) ** 2


def quad2(x):
    return (x[0] - 1.0) ** 2 + 10.0 * (x[1] + 2.0) ** 2


def rosenbrock(x):
    return 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2


def test_powell_1d_quadratic():
    x, rec = powell_minimize(quad1, [0.0], OptimizerConfig(max_iterations=100))
    assert abs(x[0] - 3.0) < 1e-6
    assert rec.converged


def test_powell_2d_quadratic():
    x, rec = powell_minimize(quad2, [0.0, 0.0], OptimizerConfig(max_iterations=200))
    assert np.max(np.abs(x - [1.0, -2.0])) < 1e-6
    assert rec.converged


def test_powell_rosenbrock():
    x, rec = powell_minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iterations=500))
    assert np.max(np.abs(x - [1.0, 1.0])) < 1e-4
    assert rec.converged


def test_powell_iteration_cap_reports_unconverged():
    x, rec = powell_minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iterations=1))
    assert not rec.converged
    assert rec.cost_history[-1] <= rec.cost_history[0]


def test_nelder_mead_1d():
    x, rec = nelder_mead_minimize(quad1, [0.0], OptimizerConfig(max_iterations=500))
    assert abs(x[0] - 3.0) < 1e-5
    assert rec.converged


def test_nelder_mead_2d_quadratic():
    x, rec = nelder_mead_minimize(quad2, [0.0, 0.0], OptimizerConfig(max_iterations=2000))
    assert np.max(np.abs(x - [1.0, -2.0])) < 1e-5
    assert rec.converged


def test_nelder_mead_constant_function_returns_x0():
    x0 = [0.4, -0.7]
    x, rec = nelder_mead_minimize(lambda v: 5.0, x0, OptimizerConfig(max_iterations=50))
    assert np.array_equal(x, x0)
    assert rec.converged
    assert rec.evaluations == 3  # just the initial simplex


def test_spsa_converges_on_quadratic():
    cfg = OptimizerConfig(kind="spsa", max_iterations=500, seed=11)
    x, rec = spsa_minimize(quad1, [0.0], cfg)
    assert abs(x[0] - 3.0) < 0.05


def test_spsa_rejects_empty_x0():
    with pytest.raises(ValueError, match="empty parameter vector"):
        spsa_minimize(quad1, [], OptimizerConfig(kind="spsa", max_iterations=10))


def test_spsa_seeded_runs_identical():
    cfg = OptimizerConfig(kind="spsa", max_iterations=200, seed=42)
    xa, ra = spsa_minimize(quad2, [0.0, 0.0], cfg)
    xb, rb = spsa_minimize(quad2, [0.0, 0.0], cfg)
    assert np.array_equal(xa, xb)
    assert ra.cost_history == rb.cost_history
    assert ra.evaluations == rb.evaluations
    assert ra.converged == rb.converged


def test_gradient_descent_quadratic():
    grad = lambda x: np.array([2.0 * (x[0] - 3.0)])
    cfg = OptimizerConfig(kind="param_shift_gd", max_iterations=500, learning_rate=0.1)
    x, rec = gradient_descent_minimize(quad1, grad, [0.0], cfg)
    assert abs(x[0] - 3.0) < 1e-6
    assert rec.converged


def test_running_minimum_monotone():
    for minimize in (powell_minimize, nelder_mead_minimize):
        _, rec = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(max_iterations=50))
        running = np.minimum.accumulate(rec.cost_history)
        assert np.all(np.diff(running) <= 0)


def test_determinism_of_deterministic_methods():
    for minimize in (powell_minimize, nelder_mead_minimize):
        xa, ra = minimize(quad2, [0.3, 0.3], OptimizerConfig(max_iterations=100))
        xb, rb = minimize(quad2, [0.3, 0.3], OptimizerConfig(max_iterations=100))
        assert np.array_equal(xa, xb)
        assert ra.cost_history == rb.cost_history


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(kind="adam")
    with pytest.raises(ValueError):
        OptimizerConfig(max_iterations=0)
    with pytest.raises(ValueError):
        OptimizerConfig(cost_tolerance=-1.0)


def test_history_counts_every_evaluation():
    calls = []

    def spy(x):
        calls.append(float(x[0]))
        return quad1(x)

    _, rec = powell_minimize(spy, [0.0], OptimizerConfig(max_iterations=20))
    assert rec.evaluations == len(calls)
    assert len(rec.cost_history) == len(calls)
