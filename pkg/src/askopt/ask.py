"""Adaptive spectral optimizer driven by gradient-flow dynamics.

Each outer iteration surrounds the current point with a box of fixed
radius, builds a spectral surrogate of the flow on that box, and evolves
the surrogate for as long a time as stays inside the box, halving the
time on every violation.  The accepted state re-centers the next box.
Iteration stops when the field norm (the gradient norm, for problems
built from gradients) drops to tolerance.

When the surrogate cannot be trusted (ill-conditioned eigenvector basis,
noisy reconstruction) or the accepted time would shrink below resolution,
the step falls back to one explicit fourth-order integration step of the
raw field, clamped to the box, so progress never stalls on a bad
decomposition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import CollocationOperators, reference_operators
from .grids import BoxDomain
from .koopman import (
    DEFAULT_COND_CAP,
    DynamicsField,
    EvolveOverflow,
    IllConditioned,
    NonFiniteDynamics,
    NumericalNoise,
    evolve_state,
    spectral_system,
)
from .problems import Problem, gradient_flow

__all__ = [
    "AskConfig",
    "AskResult",
    "AskStatus",
    "StepDiagnostics",
    "ask_step",
    "ask_optimize",
]


@dataclass(frozen=True)
class AskConfig:
    """Outer-loop settings.

    ``t_min`` bounds the retraction from below; when the trial time falls
    under it the step switches to the explicit fallback integrator.  It
    defaults to ``1e-12 * horizon``.
    """

    radius: float = 1e-1
    level: int = 1
    horizon: float = 1e2
    max_iters: int = 50_000
    tol: float = 1e-6
    t_min: float | None = None
    cond_cap: float = DEFAULT_COND_CAP
    fallback_step: float = 1e-3
    record_trajectory: bool = False

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol <= 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.cond_cap <= 0.0:
            raise ValueError(f"cond_cap must be positive, got {self.cond_cap}")
        if self.fallback_step <= 0.0:
            raise ValueError(
                f"fallback_step must be positive, got {self.fallback_step}"
            )
        if self.t_min is None:
            object.__setattr__(self, "t_min", 1e-12 * self.horizon)
        if not 0.0 < self.t_min < self.horizon:
            raise ValueError(
                f"t_min must lie in (0, horizon), got {self.t_min}"
            )


@dataclass(frozen=True)
class StepDiagnostics:
    """What one outer iteration did.

    ``accepted_t`` is the evolution time of the accepted state; on a
    fallback step it equals the fallback step size.  ``cond_phi`` is NaN
    when the decomposition itself failed.
    """

    accepted_t: float
    retractions: int
    fallback: bool
    cond_phi: float


class AskStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    FAILED = "failed"


@dataclass(frozen=True)
class AskResult:
    x_final: np.ndarray
    grad_norm: float
    outer_iters: int
    retractions_total: int
    fallbacks_total: int
    status: AskStatus
    trajectory: list[np.ndarray] | None = None


def _rk4_step(u: DynamicsField, x: np.ndarray, h: float) -> np.ndarray:
    k1 = u(x)
    k2 = u(x + 0.5 * h * k1)
    k3 = u(x + 0.5 * h * k2)
    k4 = u(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _fallback(
    u: DynamicsField,
    x: np.ndarray,
    box: BoxDomain,
    cfg: AskConfig,
    retractions: int,
    cond_phi: float,
) -> tuple[np.ndarray, StepDiagnostics]:
    x_next = np.clip(_rk4_step(u, x, cfg.fallback_step), box.lower, box.upper)
    diag = StepDiagnostics(
        accepted_t=cfg.fallback_step,
        retractions=retractions,
        fallback=True,
        cond_phi=cond_phi,
    )
    return x_next, diag


def ask_step(
    x: np.ndarray,
    u: DynamicsField,
    ops: CollocationOperators,
    cfg: AskConfig,
) -> tuple[np.ndarray, StepDiagnostics]:
    """One outer iteration from ``x``; returns the re-centered state.

    Raises NonFiniteDynamics when the field produces non-finite values on
    the box grid.
    """
    x = np.asarray(x, dtype=float)
    box = BoxDomain.around(x, cfg.radius)
    try:
        system = spectral_system(ops, box, u, cond_cap=cfg.cond_cap)
    except (IllConditioned, NumericalNoise):
        return _fallback(u, x, box, cfg, retractions=0, cond_phi=math.nan)

    t = cfg.horizon
    retractions = 0
    while t >= cfg.t_min:
        try:
            candidate = evolve_state(system, t)
        except EvolveOverflow:
            t *= 0.5
            retractions += 1
            continue
        except NumericalNoise:
            return _fallback(u, x, box, cfg, retractions, system.cond_phi)
        if box.contains(candidate):
            diag = StepDiagnostics(
                accepted_t=t,
                retractions=retractions,
                fallback=False,
                cond_phi=system.cond_phi,
            )
            return candidate, diag
        t *= 0.5
        retractions += 1
    return _fallback(u, x, box, cfg, retractions, system.cond_phi)


def ask_optimize(
    problem: Problem,
    x0: np.ndarray,
    cfg: AskConfig = AskConfig(),
) -> AskResult:
    """Drive the gradient flow of ``problem`` from ``x0`` to a critical point.

    Stops when the field norm reaches ``cfg.tol`` (CONVERGED) or after
    ``cfg.max_iters`` outer iterations (MAX_ITERS).  Non-finite field
    values anywhere along the way yield FAILED with the last finite state.
    """
    u = gradient_flow(problem)
    ops = reference_operators(problem.dim, cfg.level)
    x = np.array(x0, dtype=float)
    if x.shape != (problem.dim,):
        raise ValueError(f"x0 shape {x.shape} != ({problem.dim},)")

    trajectory: list[np.ndarray] | None = (
        [x.copy()] if cfg.record_trajectory else None
    )
    iters = 0
    retractions_total = 0
    fallbacks_total = 0
    status = AskStatus.MAX_ITERS
    grad_norm = math.inf

    try:
        while True:
            g = float(np.linalg.norm(u(x)))
            if not math.isfinite(g):
                raise NonFiniteDynamics(f"non-finite field at iteration {iters}")
            grad_norm = g
            if g <= cfg.tol:
                status = AskStatus.CONVERGED
                break
            if iters >= cfg.max_iters:
                break
            x, diag = ask_step(x, u, ops, cfg)
            iters += 1
            retractions_total += diag.retractions
            fallbacks_total += diag.fallback
            if trajectory is not None:
                trajectory.append(x.copy())
    except NonFiniteDynamics:
        status = AskStatus.FAILED
        grad_norm = math.nan

    return AskResult(
        x_final=x,
        grad_norm=grad_norm,
        outer_iters=iters,
        retractions_total=retractions_total,
        fallbacks_total=fallbacks_total,
        status=status,
        trajectory=trajectory,
    )
