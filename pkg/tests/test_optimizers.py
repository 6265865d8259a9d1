import numpy as np
import pytest

from pitdn.errors import NonFiniteLossError
from pitdn.optimizer import TrainSchedule
from pitdn.optimizers import Adam, AdamState, adam_step, LBFGS, lbfgs_minimize, strong_wolfe
from pitdn.optimizers.lbfgs import two_loop
from pitdn.optimizers.linesearch import cubic_minimizer


def quadratic(diag):
    diag = np.asarray(diag, dtype=np.float64)

    def fn(theta):
        return 0.5 * float(theta @ (diag * theta)), diag * theta

    return fn

def rosenbrock(theta):
    x, y = theta
    value = (1 - x)**2 + 100 * (y - x*x)**2
    grad  = np.array([
        -2 * (1 - x) - 400 * x * (y - x*x),
        200 * (y - x*x),
    ])
    return value, grad

def parabola(alpha):
    return (alpha - 2.0)**2, 2.0 * (alpha - 2.0), alpha


def test_adam_first_step():
    params = np.array([1.0, -2.0, 0.5])
    grad   = np.array([3.0, -0.01, 0.0])

    state, new = adam_step(AdamState.zeros(3), params, grad, 0.1, 1)

    assert np.allclose(new, params - 0.1 * np.sign(grad), atol=1e-6)
    assert np.array_equal(params, [1.0, -2.0, 0.5])
    assert np.allclose(state.m, 0.1 * grad)

def test_adam_rejects_bad_gradient():
    with pytest.raises(NonFiniteLossError):
        adam_step(AdamState.zeros(2), np.zeros(2), np.array([1.0, np.nan]), 0.1, 1)
    with pytest.raises(ValueError):
        adam_step(AdamState.zeros(2), np.zeros(2), np.zeros(3), 0.1, 1)

def test_adam_descends():
    fn = quadratic([1.0, 4.0])
    result = Adam(lr=0.05, iterations=200, progress=False).minimize(fn, np.array([1.0, 1.0]))

    assert len(result.history) == result.iterations == 200
    assert result.history[-1].total < 0.1 * result.history[0].total
    assert [e.iteration for e in result.history[:3]] == [0, 1, 2]
    assert result.reason == 'iteration cap'

def test_wolfe_accepts_unit_step():
    result = strong_wolfe(parabola, 4.0, -4.0, 1.0, c2=0.9)

    assert result.alpha == 1.0
    assert result.payload == 1.0
    assert result.evaluations == 1

def test_wolfe_tight_curvature():
    result = strong_wolfe(parabola, 4.0, -4.0, 1.0, c2=0.1)

    assert result.alpha == 2.0
    assert result.value == 0.0

def test_wolfe_zoom_after_overshoot():
    result = strong_wolfe(parabola, 4.0, -4.0, 10.0, c2=0.1)

    assert result is not None
    assert result.value <= 4.0 - 1e-4 * result.alpha * 4.0
    assert abs(result.slope) <= 0.4

def test_wolfe_gives_up_on_nan():
    assert strong_wolfe(lambda a: (np.nan, np.nan, None), 1.0, -1.0) is None

def test_cubic_minimizer():
    assert cubic_minimizer(0.0, 1.0, -2.0, 3.0, 4.0, 4.0) == pytest.approx(1.0)
    assert np.isnan(cubic_minimizer(1.0, 0.0, 0.0, 1.0, 0.0, 0.0))

def test_two_loop_empty_memory():
    g = np.array([1.0, -3.0])
    assert np.array_equal(two_loop(g, [], []), g)

def test_two_loop_secant():
    '''
    With one pair the approximation maps y onto s.
    '''
    s = np.array([1.0, 2.0])
    y = np.array([2.0, 8.0])

    assert np.allclose(two_loop(y, [s], [y]), s)

def test_lbfgs_quadratic():
    fn = quadratic([1.0, 2.0, 3.0, 4.0, 5.0])
    result = LBFGS(max_iters=100, progress=False).minimize(fn, np.ones(5))

    assert result.reason == 'gradient tolerance'
    assert result.wolfe_violations == 0
    assert np.allclose(result.theta, 0.0, atol=1e-9)
    assert result.iterations == len(result.history)

def test_lbfgs_rosenbrock():
    result = LBFGS(max_iters=100, grad_tol=1e-10, progress=False).minimize(
        rosenbrock, np.array([-1.2, 1.0])
    )

    assert np.allclose(result.theta, [1.0, 1.0], atol=1e-5)
    assert rosenbrock(result.theta)[0] <= 1e-10
    assert result.iterations <= 100

def test_lbfgs_line_search_failure():
    '''
    A gradient pointing the wrong way leaves no acceptable step; the phase ends quietly.
    '''
    def inconsistent(theta):
        return float(theta @ theta), -2.0 * theta

    theta0 = np.array([1.0, -1.0])
    result = LBFGS(max_iters=10, progress=False).minimize(inconsistent, theta0)

    assert result.reason == 'line search failure'
    assert result.iterations == 0
    assert np.array_equal(result.theta, theta0)

def test_lbfgs_non_finite_start():
    with pytest.raises(NonFiniteLossError):
        LBFGS(progress=False).minimize(lambda th: (np.inf, th), np.ones(2))

def test_lbfgs_offsets_iterations():
    result = LBFGS(max_iters=3, progress=False).minimize(rosenbrock, np.array([-1.2, 1.0]), start_iteration=7)

    assert [e.iteration for e in result.history] == [7, 8, 9]
    assert all(e.phase == 'lbfgs' for e in result.history)
    assert result.reason == 'iteration cap'

def test_lbfgs_minimize_wrapper():
    schedule = TrainSchedule(lbfgs_max_iters=50)
    result = lbfgs_minimize(quadratic([1.0, 10.0]), np.array([3.0, -1.0]), schedule)

    assert result.reason == 'gradient tolerance'
    assert result.final_loss < 1e-18

def test_lbfgs_stationary_start():
    result = LBFGS(max_iters=10, progress=False).minimize(quadratic([1.0, 2.0]), np.zeros(2))

    assert result.iterations == 0
    assert result.history == []
    assert result.reason == 'gradient tolerance'

def test_lbfgs_history_monotone_on_convex_quadratic():
    fn = quadratic([0.5, 1.0, 3.0, 8.0, 20.0])
    result = LBFGS(max_iters=50, progress=False).minimize(fn, np.array([1.0, -2.0, 0.5, 1.5, -0.3]))

    totals = [e.total for e in result.history]
    assert len(totals) > 1
    assert all(later <= earlier for earlier, later in zip(totals[:-1], totals[1:]))

def test_adam_deterministic():
    fn = quadratic([1.0, 4.0, 9.0])
    runs = [
        Adam(lr=0.05, iterations=50, progress=False).minimize(fn, np.array([1.0, -1.0, 0.5]))
        for _ in range(2)
    ]

    assert np.array_equal(runs[0].theta, runs[1].theta)
    assert [e.total for e in runs[0].history] == [e.total for e in runs[1].history]
