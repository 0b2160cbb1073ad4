"""Tests for the adaptive spectral optimizer.

Expected states come from closed-form solutions of linear flows
(x(t) = exp(-t) * x0 and relatives), computed with math.exp in the
assertions, so the optimizer is checked against an independent route.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import askopt.ask as ask_module
from askopt.ask import (
    AskConfig,
    AskResult,
    AskStatus,
    StepDiagnostics,
    ask_optimize,
    ask_step,
)
from askopt.basis import reference_operators
from askopt.grids import BoxDomain
from askopt.koopman import DynamicsField, NumericalNoise
from askopt.problems import (
    MinMax,
    Problem,
    camel3,
    camel6,
    minmax_bilinear,
    rotated_hyper_ellipsoid,
)

OPS_1D = reference_operators(1, 1)
DECAY = DynamicsField(dim=1, fn=lambda x: -x)


def _quadratic_problem(q: np.ndarray) -> Problem:
    q = np.asarray(q, dtype=float)
    return Problem(
        name="quadratic",
        dim=q.shape[0],
        value=lambda x: 0.5 * float(x @ (q @ x)),
        gradient=lambda x: q @ np.asarray(x, dtype=float),
        init_box=BoxDomain.around(np.zeros(q.shape[0]), 1.0),
    )


def test_config_defaults():
    cfg = AskConfig()
    assert cfg.radius == 0.1
    assert cfg.level == 1
    assert cfg.horizon == 100.0
    assert cfg.max_iters == 50_000
    assert cfg.tol == 1e-6
    assert cfg.t_min == 1e-12 * cfg.horizon
    assert cfg.cond_cap == 1e12
    assert cfg.fallback_step == 1e-3


@pytest.mark.parametrize(
    "kwargs",
    [
        {"radius": 0.0},
        {"radius": -1.0},
        {"level": 0},
        {"horizon": 0.0},
        {"max_iters": 0},
        {"tol": 0.0},
        {"cond_cap": 0.0},
        {"fallback_step": 0.0},
        {"t_min": 0.0},
        {"t_min": -1e-3},
        {"t_min": 100.0},  # must stay below the horizon
        {"t_min": 150.0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        AskConfig(**kwargs)


def test_step_halves_until_inside_box():
    # x(t) = exp(-t) from 1 with box [0.9, 1.1]: times 10, 5, ..., 0.15625
    # all land below 0.9; the eighth trial 10/2^7 is the first accepted
    cfg = AskConfig(radius=0.1, horizon=10.0)
    x_next, diag = ask_step(np.array([1.0]), DECAY, OPS_1D, cfg)
    assert diag.accepted_t == 10.0 / 2**7
    assert diag.retractions == 7
    assert not diag.fallback
    assert diag.cond_phi > 0.0
    assert x_next[0] == pytest.approx(math.exp(-0.078125), abs=1e-12)


def test_step_accepts_full_horizon_when_box_allows():
    cfg = AskConfig(radius=2.0, horizon=10.0)
    x_next, diag = ask_step(np.array([1.0]), DECAY, OPS_1D, cfg)
    assert diag.accepted_t == 10.0
    assert diag.retractions == 0
    assert x_next[0] == pytest.approx(math.exp(-10.0), abs=1e-12)


def test_step_at_fixed_point_returns_same_state():
    still = DynamicsField(dim=1, fn=lambda x: np.zeros(1))
    cfg = AskConfig(radius=0.1, horizon=10.0)
    x_next, diag = ask_step(np.array([1.0]), still, OPS_1D, cfg)
    assert x_next[0] == pytest.approx(1.0, abs=1e-12)
    assert diag.accepted_t == 10.0
    assert not diag.fallback


@pytest.mark.parametrize("x0,radius", [(1.0, 0.1), (0.5, 0.3), (-2.0, 0.05)])
def test_accepted_time_is_exact_halving_of_horizon(x0, radius):
    cfg = AskConfig(radius=radius, horizon=100.0)
    x_next, diag = ask_step(np.array([x0]), DECAY, OPS_1D, cfg)
    assert not diag.fallback
    assert diag.accepted_t * 2**diag.retractions == cfg.horizon
    assert abs(x_next[0] - x0) <= radius * (1.0 + 1e-12)


def test_overflow_guard_counts_as_retraction():
    # growth flow exp(t) from 1: the surrogate spectrum reaches 2, so
    # times above 350 overflow the exponential guard and must be halved
    # like any out-of-box trial; first in-box time is 800/2^14
    grow = DynamicsField(dim=1, fn=lambda x: x.copy())
    cfg = AskConfig(radius=0.1, horizon=800.0)
    x_next, diag = ask_step(np.array([1.0]), grow, OPS_1D, cfg)
    assert diag.accepted_t == 800.0 / 2**14
    assert diag.retractions == 14
    assert not diag.fallback
    assert x_next[0] == pytest.approx(math.exp(800.0 / 2**14), abs=1e-12)


def test_fallback_when_time_underflows():
    # flow so fast that no admissible time stays in the box: trials stop
    # once t drops below t_min = 1e-12 * 100 after exactly 40 halvings,
    # and one clamped explicit step runs instead
    fast = DynamicsField(dim=1, fn=lambda x: 1e13 * x)
    cfg = AskConfig(radius=0.1, horizon=100.0)
    x_next, diag = ask_step(np.array([1.0]), fast, OPS_1D, cfg)
    assert diag.fallback
    assert diag.retractions == 40
    assert diag.accepted_t == cfg.fallback_step
    assert x_next[0] == 1.1  # explicit step clamped to the box edge


def test_fallback_on_condition_cap():
    cfg = AskConfig(radius=0.1, horizon=10.0, cond_cap=1.0)
    x_next, diag = ask_step(np.array([1.0]), DECAY, OPS_1D, cfg)
    assert diag.fallback
    assert diag.retractions == 0
    assert math.isnan(diag.cond_phi)
    # single fourth-order step of size 1e-3 on dx/dt = -x
    assert x_next[0] == pytest.approx(math.exp(-1e-3), abs=1e-12)


def test_fallback_on_numerical_noise(monkeypatch):
    def raise_noise(system, t):
        raise NumericalNoise("synthetic")

    monkeypatch.setattr(ask_module, "evolve_state", raise_noise)
    cfg = AskConfig(radius=0.1, horizon=10.0)
    x_next, diag = ask_step(np.array([1.0]), DECAY, OPS_1D, cfg)
    assert diag.fallback
    assert diag.cond_phi > 0.0  # decomposition itself succeeded
    assert x_next[0] == pytest.approx(math.exp(-1e-3), abs=1e-12)


def test_quadratic_converges_in_one_iteration():
    problem = _quadratic_problem(np.eye(2))
    cfg = AskConfig(radius=2.0, horizon=100.0, tol=1e-8)
    result = ask_optimize(problem, np.array([0.6, -0.3]), cfg)
    assert result.status is AskStatus.CONVERGED
    assert result.outer_iters == 1
    assert result.grad_norm <= 1e-8


def test_wide_radius_solves_ellipsoid_in_one_iteration():
    cfg = AskConfig(radius=130.0, horizon=100.0, tol=1e-8)
    result = ask_optimize(
        rotated_hyper_ellipsoid(), np.array([30.0, -50.0]), cfg
    )
    assert result.status is AskStatus.CONVERGED
    assert result.outer_iters == 1
    assert result.grad_norm <= 1e-8


def test_already_converged_start_returns_immediately():
    result = ask_optimize(camel3(), np.zeros(2), AskConfig())
    assert result.status is AskStatus.CONVERGED
    assert result.outer_iters == 0
    assert result.retractions_total == 0
    np.testing.assert_array_equal(result.x_final, np.zeros(2))


def test_camel6_converges_to_critical_point():
    cfg = AskConfig(record_trajectory=True)
    result = ask_optimize(camel6(), np.array([0.5, -0.5]), cfg)
    assert result.status is AskStatus.CONVERGED
    assert result.grad_norm <= 1e-6
    assert len(result.trajectory) == result.outer_iters + 1
    np.testing.assert_array_equal(result.trajectory[0], [0.5, -0.5])
    for prev, cur in zip(result.trajectory, result.trajectory[1:]):
        assert np.all(np.abs(cur - prev) <= cfg.radius * (1.0 + 1e-12))


def test_max_iters_status():
    result = ask_optimize(minmax_bilinear(), np.array([0.4, -0.3]), AskConfig(max_iters=5))
    assert result.status is AskStatus.MAX_ITERS
    assert result.outer_iters == 5
    assert result.grad_norm > 1e-6


def test_failed_on_non_finite_gradient_at_start():
    bad = Problem(
        name="bad",
        dim=1,
        value=lambda x: float("nan"),
        gradient=lambda x: np.array([float("nan")]),
        init_box=BoxDomain.around(np.zeros(1), 1.0),
    )
    result = ask_optimize(bad, np.array([1.0]), AskConfig())
    assert result.status is AskStatus.FAILED
    assert result.outer_iters == 0
    assert math.isnan(result.grad_norm)


def test_failed_on_non_finite_gradient_inside_box():
    # finite at the start point but NaN at the lower grid point 0.9
    def grad(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0.95, x, np.nan)

    partial = Problem(
        name="partial",
        dim=1,
        value=lambda x: 0.5 * float(x @ x),
        gradient=grad,
        init_box=BoxDomain.around(np.zeros(1), 1.0),
    )
    result = ask_optimize(partial, np.array([1.0]), AskConfig())
    assert result.status is AskStatus.FAILED
    np.testing.assert_array_equal(result.x_final, [1.0])


def test_rejects_wrong_shape_start():
    with pytest.raises(ValueError):
        ask_optimize(camel6(), np.zeros(3), AskConfig())


def test_deterministic_iterates():
    cfg = AskConfig(max_iters=30, record_trajectory=True)
    x0 = np.array([1.3, -0.7])
    first = ask_optimize(camel6(), x0, cfg)
    second = ask_optimize(camel6(), x0, cfg)
    assert first.status == second.status
    assert first.outer_iters == second.outer_iters
    assert len(first.trajectory) == len(second.trajectory)
    for a, b in zip(first.trajectory, second.trajectory):
        np.testing.assert_array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_descent_on_strongly_convex_quadratics(seed):
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((3, 3))
    q = r @ r.T + 0.5 * np.eye(3)
    problem = _quadratic_problem(q)
    x0 = rng.uniform(-1.0, 1.0, size=3)
    cfg = AskConfig(max_iters=40, record_trajectory=True)
    result = ask_optimize(problem, x0, cfg)
    values = [problem.value(x) for x in result.trajectory]
    for before, after in zip(values, values[1:]):
        assert after < before
    assert result.fallbacks_total == 0


@settings(max_examples=20, deadline=None)
@given(
    x0=st.floats(-3.0, 3.0),
    radius=st.floats(0.01, 1.0),
)
def test_step_never_leaves_box(x0, radius):
    cfg = AskConfig(radius=radius, horizon=100.0)
    x = np.array([x0])
    x_next, diag = ask_step(x, DECAY, OPS_1D, cfg)
    box = BoxDomain.around(x, radius)
    assert box.contains(x_next)
    if not diag.fallback:
        assert diag.accepted_t * 2**diag.retractions == cfg.horizon
    bound = math.floor(math.log2(cfg.horizon / cfg.t_min)) + 1
    assert diag.retractions <= bound


def test_trajectory_none_by_default():
    result = ask_optimize(camel3(), np.zeros(2), AskConfig())
    assert result.trajectory is None
