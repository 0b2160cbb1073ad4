"""Benchmark objectives with analytic gradients.

Each problem bundles an objective, its gradient, a default initialization
box, and any critical points known in closed form (refined to machine
precision by Newton iteration where the closed form is transcendental).
A problem is either a plain minimization or a min-max problem in which the
first ``split`` coordinates are minimized and the rest maximized.

``gradient_flow`` reduces either kind to an autonomous vector field whose
trajectories approach critical points: descent directions on minimized
coordinates, ascent directions on maximized ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grids import BoxDomain
from .koopman import DynamicsField

__all__ = [
    "Minimize",
    "MinMax",
    "Problem",
    "gradient_flow",
    "registry",
    "make_least_squares",
    "rotated_hyper_ellipsoid",
    "sum_of_different_powers",
    "bohachevsky2",
    "camel3",
    "camel3_minmax",
    "camel6",
    "dixon_price",
    "dixon_price_minmax",
    "rosenbrock",
    "minmax_bilinear",
    "minmax_case2",
    "minmax_case2_alt",
]


@dataclass(frozen=True)
class Minimize:
    """All coordinates are descent directions."""


@dataclass(frozen=True)
class MinMax:
    """First ``split`` coordinates minimized, remaining ones maximized."""

    split: int


Kind = Minimize | MinMax


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    kind: Kind = field(default_factory=Minimize)
    init_box: BoxDomain | None = None
    known_optima: tuple[tuple[np.ndarray, float], ...] = ()

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if isinstance(self.kind, MinMax):
            if not 1 <= self.kind.split <= self.dim - 1:
                raise ValueError(
                    f"min-max split must lie in [1, {self.dim - 1}], "
                    f"got {self.kind.split}"
                )
        if self.init_box is not None and self.init_box.dim != self.dim:
            raise ValueError(
                f"init box has dim {self.init_box.dim}, problem has {self.dim}"
            )
        frozen = []
        for point, val in self.known_optima:
            p = np.asarray(point, dtype=float)
            if p.shape != (self.dim,):
                raise ValueError(f"known optimum shape {p.shape} != ({self.dim},)")
            p.flags.writeable = False
            frozen.append((p, float(val)))
        object.__setattr__(self, "known_optima", tuple(frozen))


def gradient_flow(problem: Problem) -> DynamicsField:
    """Vector field whose equilibria are the problem's critical points.

    Minimization flows along the negative gradient.  Min-max problems flow
    down-gradient in the minimized block and up-gradient in the maximized
    block, so saddle points of the objective become equilibria.
    """
    signs = -np.ones(problem.dim)
    if isinstance(problem.kind, MinMax):
        signs[problem.kind.split:] = 1.0
    signs.flags.writeable = False
    grad = problem.gradient

    def u(x: np.ndarray) -> np.ndarray:
        return signs * np.asarray(grad(x), dtype=float)

    return DynamicsField(dim=problem.dim, fn=u)


def _symmetric_box(dim: int, half_width: float) -> BoxDomain:
    return BoxDomain.around(np.zeros(dim), half_width)


def rotated_hyper_ellipsoid() -> Problem:
    """Nested quadratic sum in two variables: f(x) = 2*x1^2 + x2^2."""
    weights = np.array([2.0, 1.0])

    def value(x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(weights @ (x * x))

    def gradient(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 2.0 * weights * x

    return Problem(
        name="rotated_hyper_ellipsoid",
        dim=2,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(2, 65.0),
        known_optima=((np.zeros(2), 0.0),),
    )


def sum_of_different_powers() -> Problem:
    """f(x) = |x1|^2 + |x2|^3.

    The gradient component 3*|x2|*x2 is continuous at zero; the second
    derivative is not, so curvature-based checks should avoid x2 = 0.
    """
    powers = np.array([2.0, 3.0])

    def value(x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sum(np.abs(x) ** powers))

    def gradient(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return powers * np.abs(x) ** (powers - 2.0) * x

    return Problem(
        name="sum_of_different_powers",
        dim=2,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(2, 1.0),
        known_optima=((np.zeros(2), 0.0),),
    )


def bohachevsky2() -> Problem:
    """f(x) = x1^2 + x2^2 - 0.3*cos(3*pi*x1)*cos(4*pi*x2) + 0.3.

    Both quadratic terms carry unit coefficient here; variants of this
    function elsewhere weight x2^2 by 2.
    """

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(
            x1 * x1
            + x2 * x2
            - 0.3 * math.cos(3.0 * math.pi * x1) * math.cos(4.0 * math.pi * x2)
            + 0.3
        )

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        c3, s3 = math.cos(3.0 * math.pi * x1), math.sin(3.0 * math.pi * x1)
        c4, s4 = math.cos(4.0 * math.pi * x2), math.sin(4.0 * math.pi * x2)
        return np.array(
            [
                2.0 * x1 + 0.9 * math.pi * s3 * c4,
                2.0 * x2 + 1.2 * math.pi * c3 * s4,
            ]
        )

    return Problem(
        name="bohachevsky2",
        dim=2,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(2, 2.0),
        known_optima=((np.zeros(2), 0.0),),
    )


# Non-origin critical points of the three-hump camel function, refined by
# Newton iteration until the gradient vanished to double precision.
_CAMEL3_MIN = (1.747552345830289, -0.8737761729151445)
_CAMEL3_MIN_VALUE = 0.29863844223686054
_CAMEL3_SADDLE = (1.0705422918236598, -0.5352711459118299)
_CAMEL3_SADDLE_VALUE = 0.8773615577631402


def _camel3_value(x: np.ndarray) -> float:
    x1, x2 = np.asarray(x, dtype=float)
    return float(
        2.0 * x1**2 - 1.05 * x1**4 + x1**6 / 6.0 + x1 * x2 + x2**2
    )


def _camel3_gradient(x: np.ndarray) -> np.ndarray:
    x1, x2 = np.asarray(x, dtype=float)
    return np.array(
        [4.0 * x1 - 4.2 * x1**3 + x1**5 + x2, x1 + 2.0 * x2]
    )


def camel3() -> Problem:
    """Three-hump camel function: one global and two local minima."""
    m = np.array(_CAMEL3_MIN)
    return Problem(
        name="camel3",
        dim=2,
        value=_camel3_value,
        gradient=_camel3_gradient,
        init_box=_symmetric_box(2, 5.0),
        known_optima=(
            (np.zeros(2), 0.0),
            (m, _CAMEL3_MIN_VALUE),
            (-m, _CAMEL3_MIN_VALUE),
        ),
    )


def camel3_minmax() -> Problem:
    """Three-hump camel treated as min over x1, max over x2.

    The listed non-origin equilibria are the saddle points of the
    objective, which the min-max flow turns into attractors.
    """
    s = np.array(_CAMEL3_SADDLE)
    return Problem(
        name="camel3_minmax",
        dim=2,
        value=_camel3_value,
        gradient=_camel3_gradient,
        kind=MinMax(split=1),
        init_box=_symmetric_box(2, 3.0),
        known_optima=(
            (np.zeros(2), 0.0),
            (s, _CAMEL3_SADDLE_VALUE),
            (-s, _CAMEL3_SADDLE_VALUE),
        ),
    )


# Global minimizer of the six-hump camel function (one of a symmetric
# pair), Newton-refined to double precision.
_CAMEL6_MIN = (0.08984201310031807, -0.7126564030207396)
_CAMEL6_MIN_VALUE = -1.0316284534898774


def camel6() -> Problem:
    """Six-hump camel function: f = (4 - 2.1*x1^2 + x1^4/3)*x1^2 + x1*x2 + (4*x2^2 - 4)*x2^2."""

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(
            (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
            + x1 * x2
            + (4.0 * x2**2 - 4.0) * x2**2
        )

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        return np.array(
            [
                8.0 * x1 - 8.4 * x1**3 + 2.0 * x1**5 + x2,
                x1 - 8.0 * x2 + 16.0 * x2**3,
            ]
        )

    m = np.array(_CAMEL6_MIN)
    return Problem(
        name="camel6",
        dim=2,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(2, 3.0),
        known_optima=(
            (m, _CAMEL6_MIN_VALUE),
            (-m, _CAMEL6_MIN_VALUE),
        ),
    )


def _dixon_price_value(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    j = np.arange(2.0, x.size + 1.0)
    t = 2.0 * x[1:] ** 2 - x[:-1]
    return float((x[0] - 1.0) ** 2 + np.sum(j * t * t))


def _dixon_price_gradient(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    j = np.arange(2.0, x.size + 1.0)
    t = 2.0 * x[1:] ** 2 - x[:-1]
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:] += 8.0 * j * t * x[1:]
    g[:-1] -= 2.0 * j * t
    return g


def _dixon_price_optimum(dim: int) -> np.ndarray:
    # x_j = 2^(-(2^j - 2) / 2^j), so x_1 = 1 and x_j -> 1/2 as j grows.
    j = np.arange(1, dim + 1, dtype=float)
    return 2.0 ** (-(2.0**j - 2.0) / 2.0**j)


def dixon_price(dim: int = 2) -> Problem:
    """Dixon-Price chain: f = (x1 - 1)^2 + sum_j j*(2*x_j^2 - x_{j-1})^2."""
    if dim < 2:
        raise ValueError(f"dixon_price needs dim >= 2, got {dim}")
    return Problem(
        name="dixon_price",
        dim=dim,
        value=_dixon_price_value,
        gradient=_dixon_price_gradient,
        init_box=_symmetric_box(dim, 10.0),
        known_optima=((_dixon_price_optimum(dim), 0.0),),
    )


def dixon_price_minmax(dim: int = 100, split: int | None = None) -> Problem:
    """Dixon-Price objective with the leading ``split`` coordinates minimized
    and the rest maximized.  Defaults to an even split."""
    if dim < 2:
        raise ValueError(f"dixon_price_minmax needs dim >= 2, got {dim}")
    if split is None:
        split = dim // 2
    return Problem(
        name="dixon_price_minmax",
        dim=dim,
        value=_dixon_price_value,
        gradient=_dixon_price_gradient,
        kind=MinMax(split=split),
        init_box=_symmetric_box(dim, 10.0),
        known_optima=((_dixon_price_optimum(dim), 0.0),),
    )


def rosenbrock() -> Problem:
    """f(x) = 100*(x2 - x1^2)^2 + (1 - x1)^2."""

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(100.0 * (x2 - x1 * x1) ** 2 + (1.0 - x1) ** 2)

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        d = x2 - x1 * x1
        return np.array([-400.0 * x1 * d - 2.0 * (1.0 - x1), 200.0 * d])

    return Problem(
        name="rosenbrock",
        dim=2,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(2, 2.0),
        known_optima=((np.ones(2), 0.0),),
    )


def make_least_squares(dim: int, cond_target: float, seed: int) -> Problem:
    """Seeded quadratic f(x) = x'Ax/2 - x'b with prescribed conditioning.

    A is symmetric positive definite with eigenvalues spaced
    logarithmically over [1, cond_target] under a random orthogonal
    rotation; b = A @ x_star for a random x_star, so the unique minimizer
    is known by construction.
    """
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    if cond_target < 1.0:
        raise ValueError(f"cond_target must be >= 1, got {cond_target}")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    spectrum = np.logspace(0.0, math.log10(cond_target), dim)
    a = (q * spectrum) @ q.T
    a = 0.5 * (a + a.T)
    x_star = rng.standard_normal(dim)
    b = a @ x_star
    a.flags.writeable = False
    b.flags.writeable = False

    def value(x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ (a @ x) - x @ b)

    def gradient(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return a @ x - b

    return Problem(
        name="least_squares",
        dim=dim,
        value=value,
        gradient=gradient,
        init_box=_symmetric_box(dim, 1.0),
        known_optima=((x_star, value(x_star)),),
    )


def minmax_bilinear() -> Problem:
    """f(x) = x1*x2, minimized over x1 and maximized over x2.

    The unique equilibrium at the origin is surrounded by closed orbits
    of the min-max flow, which makes this the standard stress test for
    oscillation-prone saddle solvers.
    """

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(x1 * x2)

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        return np.array([x2, x1])

    return Problem(
        name="minmax_bilinear",
        dim=2,
        value=value,
        gradient=gradient,
        kind=MinMax(split=1),
        init_box=_symmetric_box(2, 1.0),
        known_optima=((np.zeros(2), 0.0),),
    )


def minmax_case2() -> Problem:
    """f(x) = -x1^2*x2^2 + 0.5*x2^2, min over x1, max over x2."""

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(-(x1 * x1) * (x2 * x2) + 0.5 * x2 * x2)

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        return np.array(
            [-2.0 * x1 * x2 * x2, -2.0 * x1 * x1 * x2 + x2]
        )

    return Problem(
        name="minmax_case2",
        dim=2,
        value=value,
        gradient=gradient,
        kind=MinMax(split=1),
        init_box=_symmetric_box(2, 1.0),
        known_optima=((np.zeros(2), 0.0),),
    )


def minmax_case2_alt() -> Problem:
    """f(x) = -x1^2*x2 + 0.5*x2^2, min over x1, max over x2.

    Variant of minmax_case2 with the coupling term linear in x2; its only
    critical point is the origin.
    """

    def value(x: np.ndarray) -> float:
        x1, x2 = np.asarray(x, dtype=float)
        return float(-(x1 * x1) * x2 + 0.5 * x2 * x2)

    def gradient(x: np.ndarray) -> np.ndarray:
        x1, x2 = np.asarray(x, dtype=float)
        return np.array([-2.0 * x1 * x2, -(x1 * x1) + x2])

    return Problem(
        name="minmax_case2_alt",
        dim=2,
        value=value,
        gradient=gradient,
        kind=MinMax(split=1),
        init_box=_symmetric_box(2, 1.0),
        known_optima=((np.zeros(2), 0.0),),
    )


def registry() -> list[Problem]:
    """All benchmark problems at their default sizes.

    (name, dim) pairs are unique, so the pair works as a lookup key.
    """
    return [
        rotated_hyper_ellipsoid(),
        sum_of_different_powers(),
        bohachevsky2(),
        camel3(),
        camel6(),
        dixon_price(2),
        dixon_price(10),
        dixon_price(100),
        rosenbrock(),
        make_least_squares(dim=2, cond_target=10.0, seed=0),
        minmax_bilinear(),
        minmax_case2(),
        minmax_case2_alt(),
        camel3_minmax(),
        dixon_price_minmax(),
    ]
