"""First-order reference optimizers on the same dynamics-field interface.

All methods step the combined field u (negative gradient on minimized
coordinates, positive on maximized ones), so one loop serves both plain
minimization and min-max problems:

  gd    x += a*u(x)                    minimization only
  hb    p = u(x) + b*p; x += a*p       either kind (momentum)
  nag   accelerated two-sequence recursion        either kind
  gda   x += a*u(x) on a min-max field            min-max only
  ogda  x += 2a*u(x_k) - a*u(x_{k-1})             min-max only

gd and gda share an update rule but guard opposite problem kinds; ogda's
first step reduces to gda because the previous field value is seeded with
the current one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .ask import AskStatus
from .koopman import DynamicsField
from .problems import MinMax, Problem, gradient_flow

__all__ = [
    "METHODS",
    "BaselineConfig",
    "BaselineState",
    "BaselineResult",
    "gd_step",
    "hb_step",
    "nag_step",
    "gda_step",
    "ogda_step",
    "run_baseline",
]

METHODS = ("gd", "hb", "nag", "gda", "ogda")
_MINIMIZE_ONLY = {"gd"}
_MINMAX_ONLY = {"gda", "ogda"}


@dataclass(frozen=True)
class BaselineConfig:
    method: str
    alpha: float = 1e-2
    beta: float = 0.9
    max_iters: int = 50_000
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol <= 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class BaselineState:
    """Iterate plus per-method memory.

    ``p`` carries heavy-ball momentum, ``y_prev``/``t_k`` the accelerated
    recursion (t_k starts at 1 and increases strictly), ``field_prev`` the
    previous field value for the optimistic correction.
    """

    x: np.ndarray
    p: np.ndarray | None = None
    y_prev: np.ndarray | None = None
    t_k: float = 1.0
    field_prev: np.ndarray | None = None


def gd_step(
    state: BaselineState, field: DynamicsField, cfg: BaselineConfig
) -> BaselineState:
    return replace(state, x=state.x + cfg.alpha * field(state.x))


def hb_step(
    state: BaselineState, field: DynamicsField, cfg: BaselineConfig
) -> BaselineState:
    p = state.p if state.p is not None else np.zeros_like(state.x)
    p = field(state.x) + cfg.beta * p
    return replace(state, x=state.x + cfg.alpha * p, p=p)


def nag_step(
    state: BaselineState, field: DynamicsField, cfg: BaselineConfig
) -> BaselineState:
    y_prev = state.y_prev if state.y_prev is not None else state.x
    t_next = (1.0 + math.sqrt(4.0 * state.t_k * state.t_k + 1.0)) / 2.0
    y = state.x + cfg.alpha * field(state.x)
    x = y + ((state.t_k - 1.0) / t_next) * (y - y_prev)
    return replace(state, x=x, y_prev=y, t_k=t_next)


def gda_step(
    state: BaselineState, field: DynamicsField, cfg: BaselineConfig
) -> BaselineState:
    # simultaneous update: both blocks read the same iterate
    return replace(state, x=state.x + cfg.alpha * field(state.x))


def ogda_step(
    state: BaselineState, field: DynamicsField, cfg: BaselineConfig
) -> BaselineState:
    current = field(state.x)
    prev = state.field_prev if state.field_prev is not None else current
    x = state.x + 2.0 * cfg.alpha * current - cfg.alpha * prev
    return replace(state, x=x, field_prev=current)


_STEPPERS = {
    "gd": gd_step,
    "hb": hb_step,
    "nag": nag_step,
    "gda": gda_step,
    "ogda": ogda_step,
}


@dataclass(frozen=True)
class BaselineResult:
    x_final: np.ndarray
    grad_norm: float
    iterations: int
    status: AskStatus


def _check_kind(method: str, problem: Problem) -> None:
    is_minmax = isinstance(problem.kind, MinMax)
    if method in _MINIMIZE_ONLY and is_minmax:
        raise ValueError(f"{method} does not handle min-max problems")
    if method in _MINMAX_ONLY and not is_minmax:
        raise ValueError(f"{method} requires a min-max problem")


def run_baseline(
    problem: Problem, x0: np.ndarray, cfg: BaselineConfig
) -> BaselineResult:
    """Iterate the configured method until the field norm reaches tol.

    Mirrors the adaptive optimizer's loop: the norm is checked before
    each step, so a converged start returns after zero iterations, and a
    non-finite field value anywhere ends the run with FAILED.
    """
    _check_kind(cfg.method, problem)
    u = gradient_flow(problem)
    step = _STEPPERS[cfg.method]
    x = np.array(x0, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"x0 shape {x.shape} != ({problem.dim},)")

    state = BaselineState(x=x)
    iters = 0
    status = AskStatus.MAX_ITERS
    grad_norm = math.inf

    while True:
        g = float(np.linalg.norm(u(state.x)))
        if not math.isfinite(g):
            return BaselineResult(
                x_final=state.x,
                grad_norm=math.nan,
                iterations=iters,
                status=AskStatus.FAILED,
            )
        grad_norm = g
        if g <= cfg.tol:
            status = AskStatus.CONVERGED
            break
        if iters >= cfg.max_iters:
            break
        state = step(state, u, cfg)
        iters += 1

    return BaselineResult(
        x_final=state.x,
        grad_norm=grad_norm,
        iterations=iters,
        status=status,
    )
