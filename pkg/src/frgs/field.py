"""Uniform periodic grids on the box [0, L)^N, quadrature and transforms."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import FieldFormatError

__all__ = [
    "Grid",
    "GridField",
    "SpectrumField",
    "fft_workers",
    "integrate",
    "lp_norm",
    "fft",
    "ifft",
    "write_field_csv",
    "read_field_csv",
    "format_float",
]


def fft_workers() -> int:
    """Thread cap for transforms, from ``FRGS_THREADS`` (default: all cores)."""
    env = os.environ.get("FRGS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Grid:
    N: int
    L: float
    n: int

    def __post_init__(self):
        if self.N not in (2, 3):
            raise ValueError(f"grid dimension must be 2 or 3, got {self.N}")
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValueError(f"box length must be positive, got {self.L}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"points per dimension must be a power of two >= 8, got {self.n}")

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** self.N

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.N

    @property
    def size(self) -> int:
        return self.n ** self.N

    @property
    def center_index(self) -> tuple[int, ...]:
        return (self.n // 2,) * self.N

    @property
    def center(self) -> np.ndarray:
        return np.full(self.N, (self.n // 2) * self.h)

    def coords(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.n) * self.h
        return tuple(np.meshgrid(*([x] * self.N), indexing="ij"))

    def index_radius2(self) -> np.ndarray:
        """Exact squared index distance of every grid point to the center point."""
        j = np.arange(self.n, dtype=np.int64) - self.n // 2
        J = np.meshgrid(*([j] * self.N), indexing="ij")
        return sum(a * a for a in J)

    def radius(self) -> np.ndarray:
        """Distance of every grid point to the center point."""
        return np.sqrt(self.index_radius2().astype(float)) * self.h

    def ball_mask(self) -> np.ndarray:
        """Points of the inscribed ball |x - center| <= L/2."""
        return self.index_radius2() <= (self.n // 2) ** 2

    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)
        return tuple(np.meshgrid(*([k] * self.N), indexing="ij"))

    def kabs(self) -> np.ndarray:
        return np.sqrt(sum(k * k for k in self.wavenumbers()))

    def field(self, values) -> "GridField":
        return GridField(self, values)


class GridField:
    """Real samples on a :class:`Grid`; immutable once built."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=float, copy=True)
        if arr.size != grid.size:
            raise ValueError(f"expected {grid.size} values, got {arr.size}")
        arr = arr.reshape(grid.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridField is immutable")

    def like(self, values) -> "GridField":
        return GridField(self.grid, values)

    def __mul__(self, alpha):
        return self.like(self.values * float(alpha))

    __rmul__ = __mul__

    def __add__(self, other):
        return self.like(self.values + other.values)

    def __sub__(self, other):
        return self.like(self.values - other.values)

    def __neg__(self):
        return self.like(-self.values)

    def __repr__(self):
        return f"GridField(grid={self.grid!r}, max={np.abs(self.values).max():.6g})"


@dataclass(frozen=True, eq=False)
class SpectrumField:
    """Unnormalized DFT coefficients ``scipy.fft.fftn(u)`` of a real field.

    Parseval reads ``integrate(|u|^2) == parseval_weight * sum(|coeffs|^2)``
    with ``parseval_weight = L^N / n^(2N)``.
    """

    grid: Grid
    coeffs: np.ndarray

    @cached_property
    def parseval_weight(self) -> float:
        return self.grid.L ** self.grid.N / float(self.grid.n) ** (2 * self.grid.N)


def _sum(values: np.ndarray) -> float:
    # contiguous 1-D reduction: numpy's pairwise tree, fixed by array length
    return float(np.sum(np.ascontiguousarray(values).ravel()))


def integrate(f: GridField) -> float:
    return f.grid.cell_volume * _sum(f.values)


def lp_norm(f: GridField, t: float) -> float:
    if t < 1:
        raise ValueError("need t >= 1")
    return integrate(f.like(np.abs(f.values) ** t)) ** (1.0 / t)


def fft(f: GridField) -> SpectrumField:
    return SpectrumField(f.grid, sfft.fftn(f.values, workers=fft_workers()))


def ifft(F: SpectrumField) -> GridField:
    return GridField(F.grid, sfft.ifftn(F.coeffs, workers=fft_workers()).real)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_field_csv(f: GridField, path_or_buffer) -> None:
    """Dump ``index,x1..xN,value`` rows in row-major order with 17 digits."""
    grid = f.grid
    coords = [c.ravel() for c in grid.coords()]
    vals = f.values.ravel()
    own = isinstance(path_or_buffer, (str, os.PathLike))
    fh = open(path_or_buffer, "w", newline="") if own else path_or_buffer
    try:
        fh.write(",".join(["index"] + [f"x{i + 1}" for i in range(grid.N)] + ["value"]) + "\n")
        for i in range(vals.size):
            row = [str(i)] + [format_float(c[i]) for c in coords] + [format_float(vals[i])]
            fh.write(",".join(row) + "\n")
    finally:
        if own:
            fh.close()


def read_field_csv(path_or_buffer) -> GridField:
    """Inverse of :func:`write_field_csv`; grid geometry is inferred."""
    if isinstance(path_or_buffer, (str, os.PathLike)):
        with open(path_or_buffer, newline="") as fh:
            text = fh.read()
    else:
        text = path_or_buffer.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FieldFormatError("empty file", 1) from None
    N = len(header) - 2
    expected = ["index"] + [f"x{i + 1}" for i in range(N)] + ["value"]
    if N not in (2, 3) or [h.strip() for h in header] != expected:
        raise FieldFormatError(f"bad header {header!r}", 1)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != N + 2:
            raise FieldFormatError(f"expected {N + 2} columns, got {len(row)}", lineno)
        try:
            idx = int(row[0])
            nums = [float(v) for v in row[1:]]
        except ValueError:
            raise FieldFormatError("non-numeric entry", lineno) from None
        if idx != len(rows):
            raise FieldFormatError(f"index {idx} out of sequence", lineno)
        if not all(np.isfinite(nums)):
            raise FieldFormatError("non-finite entry", lineno)
        rows.append(nums)
    data = np.array(rows, dtype=float)
    total = data.shape[0]
    n = round(total ** (1.0 / N))
    if n ** N != total or n < 2:
        raise FieldFormatError(f"{total} rows is not a full N={N} grid", len(rows) + 1)
    x1 = data[:, 0].reshape((n,) * N)
    h = x1[1, ...].flat[0] - x1[0, ...].flat[0]
    try:
        grid = Grid(N, n * h, n)
    except ValueError as exc:
        raise FieldFormatError(str(exc), 2) from None
    return GridField(grid, data[:, -1])
