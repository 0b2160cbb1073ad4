"""Spectral discretization of the flow generator on a box.

The generator of the dynamics x' = u(x) is collocated on a sparse grid
mapped into the box: U = sum_i diag(u_i at the grid points) * c_i * G_i,
where c_i = 2 / (upper_i - lower_i) is the chain-rule factor of the
affine reference map.  Its generalized eigenproblem against the
interpolation matrix M is reduced to a standard one on M^{-1} U.  The
observables are the coordinate functions, so the mode matrix solved from
phi C = Xi (Xi holding the physical grid coordinates) reconstructs the
state directly:

    x(t) = Re sum_j C[j, :] nu_j exp(lambda_j t)

which returns the box center exactly at t = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import CollocationOperators
from .grids import BoxDomain, map_to_box

__all__ = [
    "DEFAULT_COND_CAP",
    "DynamicsField",
    "EvolveOverflow",
    "IllConditioned",
    "NonFiniteDynamics",
    "NumericalNoise",
    "SingularBasis",
    "SpectralError",
    "SpectralSystem",
    "assemble_generator",
    "evolve_state",
    "koopman_modes",
    "spectral_decompose",
    "spectral_system",
]

DEFAULT_COND_CAP = 1e12

# residual and noise tolerances, all measured in the max-abs norm
_RESID_RTOL = 1e-8
_NOISE_RTOL = 1e-8
_RANK_TOL = 1e-12
_EXP_ARG_MAX = 700.0


class SpectralError(Exception):
    """Base for recoverable failures of the spectral pipeline."""


class SingularBasis(SpectralError):
    """The interpolation matrix could not be factorized."""


class IllConditioned(SpectralError):
    """Eigenvector or mode system too ill-conditioned to trust."""


class NumericalNoise(SpectralError):
    """Reconstruction carries a non-negligible imaginary residue."""


class EvolveOverflow(SpectralError):
    """exp(Re(lambda) * t) would overflow, the horizon must shrink."""


class NonFiniteDynamics(Exception):
    """The dynamics field produced NaN or infinity."""


@dataclass(frozen=True, eq=False)
class DynamicsField:
    """Vector field x -> u(x) driving the flow, with its dimension."""

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(x), dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """One box-local eigen-decomposition, ready to evolve."""

    eigenvalues: np.ndarray  # (N,) complex, real part descending
    eigvecs: np.ndarray  # (N, N) complex, columns
    phi: np.ndarray  # (N, N) complex, M @ eigvecs
    nu: np.ndarray  # (N,) first row of phi
    modes: np.ndarray  # (N, d) complex, solves phi @ modes = Xi
    cond_phi: float


def field_values(u: DynamicsField, points: np.ndarray) -> np.ndarray:
    """Evaluate the field at every row of `points`, demanding finiteness."""
    values = np.empty_like(points)
    for i, p in enumerate(points):
        values[i] = u(p)
    if not np.all(np.isfinite(values)):
        raise NonFiniteDynamics("dynamics produced non-finite values on the grid")
    return values


def _assemble_from_values(
    ops: CollocationOperators, box: BoxDomain, values: np.ndarray
) -> np.ndarray:
    scale = 2.0 / (box.upper - box.lower)
    U = np.zeros((ops.grid.count, ops.grid.count))
    for d in range(ops.grid.dim):
        # diag(u_d) @ G_d as a row scaling
        U += (scale[d] * values[:, d])[:, None] * ops.G[d]
    return U


def assemble_generator(
    ops: CollocationOperators, box: BoxDomain, u: DynamicsField
) -> np.ndarray:
    """Collocated generator of x' = u(x) on the box.

    Raises:
        NonFiniteDynamics: if u is not finite at some grid point.
    """
    if ops.grid.dim != box.dim:
        raise ValueError(f"operator dim {ops.grid.dim} does not match box dim {box.dim}")
    return _assemble_from_values(ops, box, field_values(u, map_to_box(ops.grid, box)))


def spectral_decompose(U: np.ndarray, M: np.ndarray, cond_cap: float = DEFAULT_COND_CAP):
    """Eigen-decomposition of the pencil (U, M) via the standard problem
    on M^{-1} U.

    Returns:
        (eigenvalues, eigvecs, phi, nu, cond_phi) with eigenvalues in a
        deterministic order: real part descending, ties by imaginary
        part ascending.

    Raises:
        SingularBasis: M could not be inverted.
        IllConditioned: cond(phi) beyond the cap, a non-finite
            decomposition, or an eigen-residual above tolerance.
    """
    try:
        A = np.linalg.solve(M, U)
    except np.linalg.LinAlgError as exc:
        raise SingularBasis("interpolation matrix is singular") from exc
    if not np.all(np.isfinite(A)):
        raise SingularBasis("interpolation solve produced non-finite entries")

    lam, W = np.linalg.eig(A)
    order = np.lexsort((lam.imag, -lam.real))
    lam = lam[order]
    W = W[:, order]
    phi = M @ W
    nu = phi[0].copy()

    if not (np.all(np.isfinite(lam.view(float))) and np.all(np.isfinite(phi.view(float)))):
        raise IllConditioned("eigen-decomposition produced non-finite entries")
    cond_phi = float(np.linalg.cond(phi))
    if not np.isfinite(cond_phi) or cond_phi > cond_cap:
        raise IllConditioned(f"cond(phi) = {cond_phi:.3e} exceeds cap {cond_cap:.3e}")
    resid = np.max(np.abs(U @ W - phi * lam))
    if resid > _RESID_RTOL * (1.0 + np.max(np.abs(U))):
        raise IllConditioned(f"eigen residual {resid:.3e} above tolerance")
    return lam, W, phi, nu, cond_phi


def koopman_modes(phi: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Solve phi @ C = Xi for the coordinate-observable modes.

    Falls back to a least-squares solve with rank cutoff 1e-12 when the
    direct solve fails or leaves a large residual.

    Raises:
        IllConditioned: no solve meets the residual tolerance.
    """
    xi = np.asarray(xi, dtype=float)
    bound = _RESID_RTOL * (1.0 + np.max(np.abs(xi)))
    modes = None
    try:
        candidate = np.linalg.solve(phi, xi.astype(complex))
        if np.max(np.abs(phi @ candidate - xi)) <= bound:
            modes = candidate
    except np.linalg.LinAlgError:
        pass
    if modes is None:
        candidate, *_ = np.linalg.lstsq(phi, xi.astype(complex), rcond=_RANK_TOL)
        if np.max(np.abs(phi @ candidate - xi)) <= bound:
            modes = candidate
        else:
            raise IllConditioned("mode residual above tolerance in both solves")
    return modes


def spectral_system(
    ops: CollocationOperators,
    box: BoxDomain,
    u: DynamicsField,
    cond_cap: float = DEFAULT_COND_CAP,
) -> SpectralSystem:
    """Assemble, decompose, and solve modes for one box."""
    points = map_to_box(ops.grid, box)
    values = field_values(u, points)
    U = _assemble_from_values(ops, box, values)
    lam, W, phi, nu, cond_phi = spectral_decompose(U, ops.M, cond_cap)
    modes = koopman_modes(phi, points)
    return SpectralSystem(
        eigenvalues=lam, eigvecs=W, phi=phi, nu=nu, modes=modes, cond_phi=cond_phi
    )


def evolve_state(sys: SpectralSystem, t: float) -> np.ndarray:
    """Reconstructed state x(t) of the box-local flow.

    Raises:
        EvolveOverflow: some Re(lambda) * t exceeds the exp range.
        NumericalNoise: imaginary residue of the reconstruction is not
            negligible against its real part.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    lam = sys.eigenvalues
    if np.any(lam.real * t > _EXP_ARG_MAX):
        raise EvolveOverflow(f"exp argument beyond {_EXP_ARG_MAX} at t = {t}")
    x = (sys.nu * np.exp(lam * t)) @ sys.modes
    re = np.max(np.abs(x.real))
    im = np.max(np.abs(x.imag))
    if not np.isfinite(re) or not np.isfinite(im):
        raise NumericalNoise("non-finite reconstruction")
    if im > _NOISE_RTOL * (1.0 + re):
        raise NumericalNoise(f"imaginary residue {im:.3e} too large at t = {t}")
    return np.ascontiguousarray(x.real)
