"""Free-space Riesz potential (-Δ)^(-s) for sources supported in a ball.

The box grid of :class:`frgs.field.Grid` carries a ball of radius L/2 about
the center point.  For a source f supported in that ball the R^N potential

    (K f)(x) = c(N, s) * integral f(y) |x - y|^(2s - N) dy

is evaluated exactly on the grid (up to quadrature of f) with a truncated
kernel: the kernel is cut off beyond the box diameter, its Fourier transform
is computed by radial quadrature, and the convolution runs on a zero-padded
grid so no periodic images interact.

For fields u supported in the ball, ``[u]^2 = <K^-1 u, u>`` is the R^N
energy of the minimal-energy extension of u outside the ball.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.fft as sfft
from numpy.polynomial.legendre import leggauss
from scipy import special
from scipy.sparse.linalg import LinearOperator, cg

from .errors import NumericalError
from .field import Grid, _sum, fft_workers

__all__ = ["riesz_constant", "radial_kernel_hat", "BallEnergy"]

_GAUSS = leggauss(16)


def riesz_constant(N: int, s: float) -> float:
    """Constant of the Riesz potential kernel c |x|^(2s-N) of (-Δ)^(-s)."""
    return math.gamma(N / 2 - s) / (4.0 ** s * math.pi ** (N / 2) * math.gamma(s))


def _bessel_moment(X: np.ndarray, N: int, s: float, panel: float = 0.5) -> np.ndarray:
    """int_0^X r^(2s - N/2) J_(N/2-1)(r) dr for X >= 0, by Gauss-Legendre panels."""
    nu = N / 2 - 1
    xg, wg = _GAUSS

    def f(r):
        return r ** (2 * s - N / 2) * special.jv(nu, r)

    def first(b):
        # r = b y^(1/2s) absorbs the r^(2s-1) endpoint singularity
        y = (xg + 1) / 2
        r = b[..., None] * y ** (1 / (2 * s))
        jac = b[..., None] / (2 * s) * y ** (1 / (2 * s) - 1)
        return (f(r) * jac * wg / 2).sum(-1)

    def partial(a, b):
        hw = (b - a) / 2
        mid = a + hw
        return (f(mid[:, None] + hw[:, None] * xg) * wg * hw[:, None]).sum(-1)

    X = np.asarray(X, dtype=float)
    out = np.empty_like(X)
    small = X <= panel
    if small.any():
        out[small] = first(X[small])
    if (~small).any():
        nb = int(np.ceil(X.max() / panel)) + 1
        edges = np.arange(nb + 1) * panel
        head = first(np.array([panel]))[0]
        cum = np.concatenate([[0.0, head], head + np.cumsum(partial(edges[1:-1], edges[2:]))])
        Xb = X[~small]
        i = np.floor(Xb / panel).astype(int)
        out[~small] = cum[i] + partial(i * panel, Xb)
    return out


def radial_kernel_hat(k: np.ndarray, N: int, s: float, R: float) -> np.ndarray:
    """Fourier transform of c |x|^(2s-N) restricted to |x| <= R, at |k|."""
    k = np.asarray(k, dtype=float)
    pref = riesz_constant(N, s) * (2 * np.pi) ** (N / 2)
    out = np.empty_like(k)
    z = k == 0
    out[z] = pref * R ** (2 * s) / (2 * s) * 2.0 ** (-(N / 2 - 1)) / math.gamma(N / 2)
    out[~z] = pref * k[~z] ** (-2 * s) * _bessel_moment(k[~z] * R, N, s)
    return out


@lru_cache(maxsize=8)
def _kernel(N: int, s: float, L: float, n: int) -> np.ndarray:
    """rfftn of the truncated kernel sampled at offsets in [-n, n)^N."""
    h = L / n
    R = math.sqrt(N) * L + h
    M = int(math.ceil(1 + math.sqrt(N))) * n
    k1 = 2 * np.pi * np.fft.fftfreq(M, d=h)
    K = np.sqrt(sum(k * k for k in np.meshgrid(*([k1] * N), indexing="ij")))
    uniq, inv = np.unique(K, return_inverse=True)
    kh = radial_kernel_hat(uniq, N, s, R)[inv].reshape(K.shape)
    w = sfft.ifftn(kh, workers=fft_workers()).real / h ** N
    idx = np.r_[0:n, M - n:M]
    w = w[np.ix_(*([idx] * N))]
    out = sfft.rfftn(w, workers=fft_workers()) * h ** N
    out.flags.writeable = False
    return out


class BallEnergy:
    """Riesz operator and energy for fields supported in the inscribed ball."""

    def __init__(self, grid: Grid, s: float, rtol: float = 1e-10, maxiter: int = 2000):
        if not 0.0 < s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {s}")
        self.grid = grid
        self.s = s
        self.rtol = rtol
        self.maxiter = maxiter
        n, N = grid.n, grid.N
        self.mask = grid.ball_mask()
        self.mask.flags.writeable = False
        self._flat = np.flatnonzero(self.mask.ravel())
        self._khat = _kernel(N, float(s), float(grid.L), n)
        h = grid.h
        k1 = 2 * np.pi * np.fft.fftfreq(2 * n, d=h)
        kr = 2 * np.pi * np.fft.rfftfreq(2 * n, d=h)
        Ks = np.meshgrid(*([k1] * (N - 1) + [kr]), indexing="ij")
        # torus symbol with a low-frequency floor: spectrally close to K^-1
        self._prec = np.sqrt(sum(k * k for k in Ks)) ** (2 * s) + (np.pi / grid.L) ** (2 * s)
        self.cg_iterations = 0

    @property
    def size(self) -> int:
        return self._flat.size

    def _conv(self, f: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        n, N = self.grid.n, self.grid.N
        pad = np.zeros((2 * n,) * N)
        pad[(slice(0, n),) * N] = f
        out = sfft.irfftn(sfft.rfftn(pad, workers=fft_workers()) * symbol,
                          s=(2 * n,) * N, workers=fft_workers())
        return out[(slice(0, n),) * N]

    def restrict(self, values: np.ndarray) -> np.ndarray:
        return np.where(self.mask, np.reshape(values, self.grid.shape), 0.0)

    def potential(self, f: np.ndarray) -> np.ndarray:
        """(-Δ)^(-s) of the ball part of f, evaluated on the whole box grid."""
        return self._conv(self.restrict(f), self._khat)

    def _scatter(self, v: np.ndarray) -> np.ndarray:
        full = np.zeros(self.grid.size)
        full[self._flat] = v
        return full.reshape(self.grid.shape)

    def source(self, u: np.ndarray, x0: np.ndarray | None = None) -> np.ndarray:
        """Solve K f = u on the ball; f vanishes outside it."""
        flat = self._flat
        b = np.reshape(u, -1)[flat]
        if not np.any(b):
            return np.zeros(self.grid.shape)
        A = LinearOperator((flat.size,) * 2, dtype=float,
                           matvec=lambda v: self._conv(self._scatter(v), self._khat).ravel()[flat])
        P = LinearOperator((flat.size,) * 2, dtype=float,
                           matvec=lambda v: self._conv(self._scatter(v), self._prec).ravel()[flat])
        count = [0]

        def tick(_):
            count[0] += 1

        start = None if x0 is None else np.reshape(x0, -1)[flat]
        f, info = cg(A, b, x0=start, rtol=self.rtol, atol=0.0, maxiter=self.maxiter, M=P,
                     callback=tick)
        self.cg_iterations += count[0]
        if info != 0:
            raise NumericalError(f"Riesz inversion did not converge (info={info})")
        return self._scatter(f)

    def integrate(self, values: np.ndarray) -> float:
        return self.grid.cell_volume * _sum(self.restrict(values))

    def seminorm_sq(self, values: np.ndarray, source: np.ndarray | None = None) -> float:
        f = self.source(values) if source is None else source
        return self.integrate(self.restrict(values) * f)

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return self.integrate(self.restrict(a) * self.source(b))
