"""Nested Chebyshev sparse grids on the reference cube [-1, 1]^d.

The 1-D building block is the nested family of Chebyshev extrema: level 0
is the single point {0}, and level l >= 1 holds the 2^l + 1 points
cos(k pi / 2^l), k = 0..2^l.  Multivariate grids are Smolyak unions of
tensor products of these sets over all per-dimension level multi-indices
m with |m|_1 <= level, enumerated through disjoint per-depth increments
so no duplicate handling is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["BoxDomain", "ReferenceGrid", "chebyshev_points_1d", "map_to_box", "smolyak_grid"]


def _new_points_at_depth(depth: int) -> np.ndarray:
    """Points first appearing at a given refinement depth, ascending."""
    if depth == 0:
        return np.zeros(1)
    if depth == 1:
        return np.array([-1.0, 1.0])
    # odd k only; k/2^depth is exactly representable, which keeps points
    # bit-identical across the levels that share them
    k = np.arange(1, 2**depth, 2)
    return np.sort(np.cos(np.pi * (k / 2.0**depth)))


def chebyshev_points_1d(level: int) -> np.ndarray:
    """Nested Chebyshev extrema for one dimension.

    Points are ordered center first, then by the depth at which they
    first appear, ascending within each depth, so the level-l set is a
    prefix of the level-(l+1) set.

    Args:
        level: refinement level, >= 0.

    Returns:
        Array of length 1 for level 0, else 2**level + 1.
    """
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    return np.concatenate([_new_points_at_depth(m) for m in range(level + 1)])


@dataclass(frozen=True, eq=False)
class ReferenceGrid:
    """Sparse collocation grid on the reference cube [-1, 1]^dim."""

    dim: int
    level: int
    points: np.ndarray  # (count, dim); first row is the center

    @property
    def count(self) -> int:
        return self.points.shape[0]


def _depth_multi_indices(total: int, parts: int):
    """Compositions of `total` into `parts` nonnegative integers, by
    descending lexicographic order (first dimension refined first)."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _depth_multi_indices(total - head, parts - 1):
            yield (head,) + tail


@lru_cache(maxsize=None)
def smolyak_grid(dim: int, level: int) -> ReferenceGrid:
    """Sparse tensor-union grid for a given dimension and level.

    Enumerates depth multi-indices m with |m|_1 <= level ordered by total
    depth, then descending lexicographically, and expands each into the
    tensor product of the per-depth point increments.  The increments are
    disjoint, so the rows are distinct by construction and the zero
    vector always comes first.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    deltas = [_new_points_at_depth(m) for m in range(level + 1)]
    rows: list[tuple[float, ...]] = []
    for total in range(level + 1):
        for m in _depth_multi_indices(total, dim):
            rows.extend(itertools.product(*(deltas[mi] for mi in m)))
    points = np.array(rows, dtype=float)
    points.flags.writeable = False
    return ReferenceGrid(dim=dim, level=level, points=points)


@dataclass(frozen=True, eq=False)
class BoxDomain:
    """Axis-aligned box with strictly positive side lengths."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError(
                f"bounds must be 1-d arrays of equal length, got {lower.shape} and {upper.shape}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if not np.all(lower < upper):
            raise ValueError("box must satisfy lower < upper in every dimension")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @staticmethod
    def around(center: np.ndarray, radius: float) -> "BoxDomain":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        return BoxDomain(center - radius, center + radius)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x: np.ndarray) -> bool:
        """Closed-interval membership, exact comparisons."""
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def map_to_box(grid: ReferenceGrid, box: BoxDomain) -> np.ndarray:
    """Affine image of the reference points in the box.

    Written as a convex combination of the bounds so the endpoints map
    exactly and no point lands outside the box by rounding.
    """
    if grid.dim != box.dim:
        raise ValueError(f"grid dim {grid.dim} does not match box dim {box.dim}")
    w = (grid.points + 1.0) / 2.0
    return box.lower * (1.0 - w) + box.upper * w
