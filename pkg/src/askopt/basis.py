"""Tensor Chebyshev collocation basis matched to the sparse grids.

Every grid gets a downward-closed set of Chebyshev degree multi-indices
of the same cardinality, built from the same depth multi-index
enumeration as the grid itself: depth 0 contributes degree {0}, depth 1
degrees {1, 2}, and depth m >= 2 degrees {2^(m-1)+1, ..., 2^m}.  The
per-depth degree blocks partition the naturals exactly as the per-depth
point increments partition the nested point sets, so the collocation
matrix is square, and interpolation on the span is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grids import ReferenceGrid, smolyak_grid

__all__ = [
    "BasisIndexSet",
    "CollocationOperators",
    "basis_index_set",
    "chebyshev_t_and_derivative",
    "differentiation_matrices",
    "interpolation_matrix",
    "reference_operators",
]


def _new_degrees_at_depth(depth: int) -> range:
    if depth == 0:
        return range(0, 1)
    if depth == 1:
        return range(1, 3)
    return range(2 ** (depth - 1) + 1, 2**depth + 1)


@dataclass(frozen=True, eq=False)
class BasisIndexSet:
    """Downward-closed Chebyshev degree multi-indices, one per grid point."""

    indices: np.ndarray  # (count, dim) integer degrees

    @property
    def count(self) -> int:
        return self.indices.shape[0]

    @property
    def dim(self) -> int:
        return self.indices.shape[1]


def _depth_multi_indices(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _depth_multi_indices(total - head, parts - 1):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _basis_index_set(dim: int, level: int) -> BasisIndexSet:
    import itertools

    blocks = [_new_degrees_at_depth(m) for m in range(level + 1)]
    rows: list[tuple[int, ...]] = []
    for total in range(level + 1):
        for m in _depth_multi_indices(total, dim):
            rows.extend(itertools.product(*(blocks[mi] for mi in m)))
    indices = np.array(rows, dtype=int)
    indices.flags.writeable = False
    return BasisIndexSet(indices=indices)


def basis_index_set(grid: ReferenceGrid) -> BasisIndexSet:
    """Degree multi-indices paired with the grid, in grid enumeration order."""
    return _basis_index_set(grid.dim, grid.level)


def chebyshev_t_and_derivative(x: np.ndarray, max_degree: int):
    """Chebyshev values T_0..T_n and first derivatives at sample points.

    Uses the three-term recurrence for the values and its differentiated
    form for the derivatives, so both are exact polynomials evaluations
    with no trigonometric shortcuts.

    Returns:
        Pair of arrays of shape (max_degree + 1, len(x)).
    """
    x = np.asarray(x, dtype=float)
    n = max_degree + 1
    T = np.empty((n, x.shape[0]))
    dT = np.empty_like(T)
    T[0] = 1.0
    dT[0] = 0.0
    if n > 1:
        T[1] = x
        dT[1] = 1.0
    for k in range(2, n):
        T[k] = 2.0 * x * T[k - 1] - T[k - 2]
        dT[k] = 2.0 * T[k - 1] + 2.0 * x * dT[k - 1] - dT[k - 2]
    return T, dT


def _tensor_values(grid: ReferenceGrid, basis: BasisIndexSet, derivative_dim=None):
    if basis.dim != grid.dim:
        raise ValueError(f"basis dim {basis.dim} does not match grid dim {grid.dim}")
    deg = basis.indices
    out = np.ones((grid.count, basis.count))
    for d in range(grid.dim):
        T, dT = chebyshev_t_and_derivative(grid.points[:, d], int(deg[:, d].max()))
        table = dT if d == derivative_dim else T
        out *= table[deg[:, d]].T
    return out


def interpolation_matrix(grid: ReferenceGrid, basis: BasisIndexSet) -> np.ndarray:
    """Square collocation matrix M[i, j] = basis_j(grid point i)."""
    return _tensor_values(grid, basis)


def differentiation_matrices(grid: ReferenceGrid, basis: BasisIndexSet):
    """Per-dimension derivative collocation matrices on the reference cube.

    Entry [i, j] of the d-th matrix is the partial derivative of basis
    term j along dimension d, evaluated at grid point i.  No domain
    scaling is applied here; callers owning a physical box apply the
    chain-rule factor themselves.
    """
    return [_tensor_values(grid, basis, derivative_dim=d) for d in range(grid.dim)]


@dataclass(frozen=True, eq=False)
class CollocationOperators:
    """Reference-domain operator bundle, shareable across solver steps."""

    grid: ReferenceGrid
    basis: BasisIndexSet
    M: np.ndarray
    G: tuple
    cond_m: float


@lru_cache(maxsize=None)
def reference_operators(dim: int, level: int) -> CollocationOperators:
    """Build (once) and cache the reference operators for (dim, level).

    The returned arrays are marked read-only since the bundle is shared
    by every optimization step at this dimension and level.
    """
    grid = smolyak_grid(dim, level)
    basis = basis_index_set(grid)
    M = interpolation_matrix(grid, basis)
    G = differentiation_matrices(grid, basis)
    cond_m = float(np.linalg.cond(M))
    M.flags.writeable = False
    for g in G:
        g.flags.writeable = False
    return CollocationOperators(grid=grid, basis=basis, M=M, G=tuple(G), cond_m=cond_m)
