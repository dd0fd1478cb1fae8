"""Symmetric-decreasing rearrangement on the grid, truncation and radial decay."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError
from .field import Grid, GridField, lp_norm
from .fracop import FracParams, seminorm_sq_fourier, sphere_measure

__all__ = [
    "rearrange_order",
    "rearrange_values",
    "symm_decr_rearrange",
    "is_radially_monotone",
    "shells",
    "polya_szego_check",
    "truncate",
    "decay_bound_check",
]


def _order_for_shape(shape: tuple[int, ...]) -> np.ndarray:
    """Flat indices sorted by squared index distance to the center, then lexicographically."""
    axes = [np.arange(m) - m // 2 for m in shape]
    J = np.meshgrid(*axes, indexing="ij")
    d2 = sum(j.astype(np.int64) ** 2 for j in J).ravel()
    # stable sort on exact integer keys keeps lexicographic order within a shell
    return np.argsort(d2, kind="stable")


@lru_cache(maxsize=16)
def _cached_order(shape: tuple[int, ...], radius2: int | None) -> np.ndarray:
    order = _order_for_shape(shape)
    if radius2 is not None:
        axes = [np.arange(m) - m // 2 for m in shape]
        d2 = sum(j.astype(np.int64) ** 2 for j in np.meshgrid(*axes, indexing="ij")).ravel()
        order = order[d2[order] <= radius2]
    order.flags.writeable = False
    return order


def _ball_radius2(grid: Grid) -> int:
    # integer squared index radius of the inscribed ball |x - c| <= L/2
    return (grid.n // 2) ** 2


def rearrange_order(grid: Grid, ball: bool = False) -> np.ndarray:
    """Cached permutation ranking grid points by distance to the center point.

    With ``ball=True`` only the points of the inscribed ball are ranked; the
    ball ranking is a prefix of the full one.
    """
    return _cached_order(grid.shape, _ball_radius2(grid) if ball else None)


def rearrange_values(values) -> np.ndarray:
    """Rearrange a raw array of any shape about its center index ``m // 2``."""
    arr = np.asarray(values, dtype=float)
    order = _cached_order(arr.shape, None)
    out = np.empty(arr.size)
    out[order] = np.sort(np.abs(arr).ravel())[::-1]
    return out.reshape(arr.shape)


def symm_decr_rearrange(u: GridField, ball: bool = False) -> GridField:
    """Sort |u| descending along the distance ranking.

    With ``ball=True`` the values inside the inscribed ball are rearranged
    there and the outside is set to zero.
    """
    if not ball:
        return u.like(rearrange_values(u.values))
    order = rearrange_order(u.grid, ball=True)
    flat = np.abs(u.values).ravel()
    out = np.zeros(u.grid.size)
    out[order] = np.sort(flat[order])[::-1]
    return u.like(out)


def is_radially_monotone(u: GridField) -> bool:
    """Nonnegative and non-increasing along the distance ranking."""
    seq = u.values.ravel()[rearrange_order(u.grid)]
    return bool(np.all(seq >= 0.0) and np.all(np.diff(seq) <= 0.0))


def shells(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Distinct center distances (ascending) and the first ranked point of each shell."""
    order = rearrange_order(grid)
    r = grid.radius().ravel()[order]
    first = np.flatnonzero(np.r_[True, np.diff(r) > 0.0])
    return r[first], order[first]


def polya_szego_check(u: GridField, fp: FracParams) -> tuple[float, float]:
    """Return ([u*]^2, [u]^2) for the torus seminorm."""
    return seminorm_sq_fourier(symm_decr_rearrange(u), fp), seminorm_sq_fourier(u, fp)


def truncate(u: GridField, c: float) -> GridField:
    """Pointwise ``min(max(u - c, 0), 1/c)``."""
    if not 0.0 < c < 1.0:
        raise DomainError(f"truncation level must lie in (0, 1), got {c}")
    return u.like(np.minimum(np.maximum(u.values - c, 0.0), 1.0 / c))


def decay_bound_check(u: GridField, t: float) -> float:
    """Largest excess of u over the radial bound ``(N/w)^(1/t) |x|^(-N/t) |u|_t``.

    Points closer than two spacings to the center are skipped.  A value <= 0
    means the bound holds everywhere it is tested.
    """
    if t < 1.0:
        raise DomainError("need t >= 1")
    if not is_radially_monotone(u):
        raise DomainError("decay bound needs a nonnegative radially non-increasing field")
    grid = u.grid
    r = grid.radius()
    far = r >= 2.0 * grid.h
    N = grid.N
    bound = (N / sphere_measure(N)) ** (1.0 / t) * r[far] ** (-N / t) * lp_norm(u, t)
    return float(np.max(u.values[far] - bound))
