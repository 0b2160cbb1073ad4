"""Tests for the benchmark problem definitions.

Gradients are checked against central finite differences of the objective,
computed here from scratch.  Known optima and hand-evaluated objective
values are frozen as literals.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from askopt.grids import BoxDomain
from askopt.problems import (
    MinMax,
    Minimize,
    Problem,
    bohachevsky2,
    camel3,
    camel3_minmax,
    camel6,
    dixon_price,
    dixon_price_minmax,
    gradient_flow,
    make_least_squares,
    minmax_bilinear,
    minmax_case2,
    minmax_case2_alt,
    registry,
    rosenbrock,
    rotated_hyper_ellipsoid,
    sum_of_different_powers,
)

ALL_PROBLEMS = registry()
PROBLEM_IDS = [f"{p.name}_d{p.dim}" for p in ALL_PROBLEMS]


def _central_difference(value, x):
    """Gradient of a scalar function by per-coordinate central differences."""
    h = 1e-6 * (1.0 + np.abs(x))
    g = np.empty_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h[j]
        g[j] = (value(x + step) - value(x - step)) / (2.0 * h[j])
    return g


@pytest.mark.parametrize("problem", ALL_PROBLEMS, ids=PROBLEM_IDS)
def test_gradient_matches_finite_differences(problem):
    rng = np.random.default_rng(0)
    box = problem.init_box
    span = box.upper - box.lower
    for _ in range(100):
        x = box.lower + span * rng.random(problem.dim)
        g = problem.gradient(x)
        g_fd = _central_difference(problem.value, x)
        err = np.linalg.norm(g_fd - g)
        assert err <= 1e-5 * (1.0 + np.linalg.norm(g))


@pytest.mark.parametrize("problem", ALL_PROBLEMS, ids=PROBLEM_IDS)
def test_known_optima_are_critical_points(problem):
    assert problem.known_optima, f"{problem.name} lists no known optima"
    for point, value in problem.known_optima:
        assert np.linalg.norm(problem.gradient(point)) <= 1e-8
        assert abs(problem.value(point) - value) <= 1e-12 * (1.0 + abs(value))


def test_registry_keys_unique_and_boxes_match():
    keys = [(p.name, p.dim) for p in ALL_PROBLEMS]
    assert len(set(keys)) == len(keys)
    for p in ALL_PROBLEMS:
        assert p.init_box is not None
        assert p.init_box.dim == p.dim


def test_rotated_hyper_ellipsoid_hand_values():
    p = rotated_hyper_ellipsoid()
    assert p.value(np.array([1.0, 1.0])) == 3.0
    assert p.value(np.array([2.0, -1.0])) == 9.0
    np.testing.assert_array_equal(p.gradient(np.array([1.0, 1.0])), [4.0, 2.0])
    np.testing.assert_array_equal(p.gradient(np.array([-3.0, 2.0])), [-12.0, 4.0])


def test_sum_of_different_powers_hand_values():
    p = sum_of_different_powers()
    assert p.value(np.array([0.5, -0.5])) == 0.375
    np.testing.assert_array_equal(
        p.gradient(np.array([0.5, -0.5])), [1.0, -0.75]
    )
    np.testing.assert_array_equal(p.gradient(np.zeros(2)), [0.0, 0.0])


@given(x2=st.floats(-1.0, 1.0))
def test_sum_of_different_powers_gradient_continuous_at_zero(x2):
    # second component is 3*|x2|*x2, so its magnitude is exactly 3*x2^2
    p = sum_of_different_powers()
    g = p.gradient(np.array([0.0, x2]))
    assert abs(g[1]) <= 3.0 * x2 * x2 + 1e-300


def test_bohachevsky2_hand_values():
    p = bohachevsky2()
    assert p.value(np.zeros(2)) == 0.0
    np.testing.assert_array_equal(p.gradient(np.zeros(2)), [0.0, 0.0])
    # 0.25 + 0.25 - 0.3*cos(1.5*pi)*cos(2*pi) + 0.3 with cos(1.5*pi) = 0
    assert p.value(np.array([0.5, 0.5])) == pytest.approx(0.8, abs=1e-12)


def test_camel3_known_points():
    p = camel3()
    origin, m_plus, m_minus = p.known_optima
    assert p.value(np.zeros(2)) == 0.0
    assert m_plus[1] == m_minus[1] == pytest.approx(0.29863844223686054, rel=1e-13)
    np.testing.assert_allclose(m_plus[0], -m_minus[0])


def test_camel3_minmax_saddles():
    p = camel3_minmax()
    assert p.kind == MinMax(split=1)
    saddle = np.array([1.0705422918236598, -0.5352711459118299])
    assert np.linalg.norm(p.gradient(saddle)) <= 1e-12
    assert p.value(saddle) == pytest.approx(0.8773615577631402, rel=1e-13)


def test_camel6_approximate_minimum():
    p = camel6()
    assert p.value(np.array([0.0898, -0.7126])) == pytest.approx(
        -1.0316, abs=1e-4
    )
    point, value = p.known_optima[0]
    assert value == pytest.approx(-1.0316284534898774, rel=1e-15)
    assert np.linalg.norm(p.gradient(point)) <= 1e-13


def test_rosenbrock_minimum():
    p = rosenbrock()
    assert p.value(np.ones(2)) == 0.0
    np.testing.assert_array_equal(p.gradient(np.ones(2)), [0.0, 0.0])


def test_dixon_price_optimum_formula():
    p2 = dixon_price(2)
    point, value = p2.known_optima[0]
    np.testing.assert_array_equal(point, [1.0, 2.0**-0.5])
    assert value == 0.0
    assert p2.value(point) <= 1e-30

    # x_j = 2^(-(2^j - 2)/2^j): j=3 gives 2^(-6/8)
    p3 = dixon_price(3)
    np.testing.assert_allclose(
        p3.known_optima[0][0], [1.0, 2.0**-0.5, 2.0**-0.75], rtol=1e-15
    )


def test_dixon_price_hand_gradient():
    # f = (x1-1)^2 + 2*(2*x2^2 - x1)^2 at (2, 1): t = 0, so f = 1
    p = dixon_price(2)
    x = np.array([2.0, 1.0])
    assert p.value(x) == 1.0
    np.testing.assert_array_equal(p.gradient(x), [2.0, 0.0])
    # at (1, 1): t = 1, f = 2, grad = (-2*2*1, 8*2*1*1) = (-4, 16)
    x = np.ones(2)
    assert p.value(x) == 2.0
    np.testing.assert_array_equal(p.gradient(x), [-4.0, 16.0])


def test_dixon_price_rejects_small_dim():
    with pytest.raises(ValueError):
        dixon_price(1)
    with pytest.raises(ValueError):
        dixon_price_minmax(1)


def test_gradient_flow_minimize_is_negative_gradient():
    p = camel6()
    u = gradient_flow(p)
    assert u.dim == 2
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.uniform(-3.0, 3.0, size=2)
        np.testing.assert_array_equal(u(x), -p.gradient(x))


def test_gradient_flow_bilinear_rotation():
    u = gradient_flow(minmax_bilinear())
    np.testing.assert_array_equal(u(np.array([0.3, -0.7])), [0.7, 0.3])
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = rng.uniform(-1.0, 1.0, size=2)
        np.testing.assert_array_equal(u(x), [-x[1], x[0]])


def test_gradient_flow_case2_field():
    u = gradient_flow(minmax_case2())
    x1, x2 = 0.6, -0.8
    expected = np.array(
        [2.0 * x1 * x2 * x2, -2.0 * x1 * x1 * x2 + x2]
    )
    np.testing.assert_allclose(u(np.array([x1, x2])), expected, rtol=1e-15)


def test_gradient_flow_case2_alt_field():
    u = gradient_flow(minmax_case2_alt())
    x1, x2 = 0.6, -0.8
    expected = np.array([2.0 * x1 * x2, -(x1 * x1) + x2])
    np.testing.assert_allclose(u(np.array([x1, x2])), expected, rtol=1e-15)


def test_gradient_flow_split_signs():
    # f = ||x||^2 / 2 with the first two coordinates minimized and the
    # third maximized: the field must flip sign exactly at the split.
    p = Problem(
        name="split_check",
        dim=3,
        value=lambda x: 0.5 * float(x @ x),
        gradient=lambda x: np.asarray(x, dtype=float),
        kind=MinMax(split=2),
        init_box=BoxDomain.around(np.zeros(3), 1.0),
    )
    u = gradient_flow(p)
    np.testing.assert_array_equal(
        u(np.array([1.0, -2.0, 3.0])), [-1.0, 2.0, 3.0]
    )


def test_minmax_split_validation():
    kwargs = dict(
        name="bad",
        dim=2,
        value=lambda x: 0.0,
        gradient=lambda x: np.zeros(2),
        init_box=BoxDomain.around(np.zeros(2), 1.0),
    )
    with pytest.raises(ValueError):
        Problem(kind=MinMax(split=0), **kwargs)
    with pytest.raises(ValueError):
        Problem(kind=MinMax(split=2), **kwargs)
    Problem(kind=MinMax(split=1), **kwargs)


def test_dixon_price_minmax_default_split():
    assert dixon_price_minmax().kind == MinMax(split=50)
    assert dixon_price_minmax(10, 3).kind == MinMax(split=3)
    assert dixon_price_minmax(10).kind == MinMax(split=5)


def test_least_squares_is_the_stated_quadratic():
    # reconstruct the quadratic coefficients from gradient evaluations and
    # confirm f(x) = a*x^2/2 - b*x in one dimension
    p = make_least_squares(dim=1, cond_target=100.0, seed=5)
    g0 = p.gradient(np.zeros(1))[0]
    a = p.gradient(np.ones(1))[0] - g0
    b = -g0
    assert a == pytest.approx(1.0, rel=1e-12)  # 1-d spectrum collapses to {1}
    for x in np.linspace(-2.0, 3.0, 7):
        expected = 0.5 * a * x * x - b * x
        assert p.value(np.array([x])) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_least_squares_minimizer_recorded():
    p = make_least_squares(dim=6, cond_target=50.0, seed=11)
    point, value = p.known_optima[0]
    assert np.linalg.norm(p.gradient(point)) <= 1e-10
    assert p.value(point) == pytest.approx(value, rel=1e-12)


def test_least_squares_condition_number():
    dim, target = 50, 1000.0
    p = make_least_squares(dim=dim, cond_target=target, seed=7)
    g0 = p.gradient(np.zeros(dim))
    a = np.empty((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        a[:, j] = p.gradient(e) - g0
    cond = np.linalg.cond(a)
    assert abs(cond - target) <= 0.05 * target


def test_least_squares_seeding():
    x = np.array([0.3, -1.2, 0.7])
    g1 = make_least_squares(3, 10.0, seed=42).gradient(x)
    g2 = make_least_squares(3, 10.0, seed=42).gradient(x)
    g3 = make_least_squares(3, 10.0, seed=43).gradient(x)
    np.testing.assert_array_equal(g1, g2)
    assert np.any(g1 != g3)


def test_least_squares_validation():
    with pytest.raises(ValueError):
        make_least_squares(0, 10.0, seed=0)
    with pytest.raises(ValueError):
        make_least_squares(2, 0.9, seed=0)


@settings(max_examples=30)
@given(
    data=st.data(),
    index=st.integers(0, len(ALL_PROBLEMS) - 1),
)
def test_gradient_flow_norm_equals_gradient_norm(data, index):
    # sign flips never change the field magnitude
    problem = ALL_PROBLEMS[index]
    if problem.dim > 10:
        problem = ALL_PROBLEMS[0]
    coords = data.draw(
        st.lists(
            st.floats(-1.0, 1.0),
            min_size=problem.dim,
            max_size=problem.dim,
        )
    )
    x = np.asarray(coords)
    u = gradient_flow(problem)
    assert np.linalg.norm(u(x)) == pytest.approx(
        np.linalg.norm(problem.gradient(x)), rel=1e-15, abs=0.0
    )


def test_default_kind_is_minimize():
    assert isinstance(rosenbrock().kind, Minimize)
    assert isinstance(camel3().kind, Minimize)
