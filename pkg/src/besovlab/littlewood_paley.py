"""Smooth dyadic resolution of unity and Fourier-side Besov summands.

The blocks ``K_j * f`` with ``K_j = F^-1 phi_j`` are computed without ever
sampling ``f`` on a uniform grid:

1. the kernel is cubic-interpolated on a uniform grid of spacing
   ``Delta_j = 2^-(j-1) / oversample``, so ``(K_j * f)(m Delta_j)`` becomes a
   discrete convolution of kernel samples with the interpolation moments
   ``c_m = int L_m(y) f(y) dy``;
2. the moments are integrated by Gauss-Legendre on a partition that refines
   geometrically towards the origin, so singular catalog functions are
   resolved down to ``2^-depth Delta_j``;
3. the discrete convolution is done by FFT and the result is cubic
   interpolated to the log-dyadic nodes.

For levels where ``local_radius * 2^-(j-1)`` is smaller than the support of
``f``, the input is multiplied by a smooth window of that radius.  The part
removed is smooth on a scale ``local_radius`` times coarser than the kernel,
so its block is far below double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from .core import FREQUENCY, Numerics, SummandSequence
from .grid import GridFunction, LogDyadicGrid, build_grid
from .params import ParameterError, SpaceParams, validate_space
from .testfns import PointwiseFunction, smooth_step
from .weighted_lp import dyadic_norms_pos

__all__ = [
    "BumpPsi",
    "PhiFamily",
    "BandKernel",
    "KernelTailError",
    "make_phi_family",
    "make_band_kernel",
    "band_convolve",
    "fourier_block_norms",
    "fourier_block_values",
    "besov_summands_fourier",
    "clear_cache",
]

TAIL_TOL = 1e-10


class KernelTailError(RuntimeError):
    """The tabulated kernel does not decay below the tail tolerance."""


class BumpPsi:
    """``psi = 1`` on ``|x| <= 1``, ``0`` on ``|x| >= 3/2``, smooth in between."""

    def transition(self, a):
        return smooth_step(2.0 * (np.asarray(a, dtype=float) - 1.0))

    def __call__(self, xi):
        return self.transition(np.abs(np.asarray(xi, dtype=float)))


@dataclass(frozen=True)
class PhiFamily:
    """``phi_0 = psi``, ``phi_1 = psi(./2) - psi``, ``phi_j = phi_1(2^(1-j) .)``."""

    psi: BumpPsi = field(repr=False)
    j_max: int

    def __call__(self, j: int, xi):
        xi = np.asarray(xi, dtype=float)
        if j < 0:
            raise ValueError("level must be nonnegative")
        if j == 0:
            return self.psi(xi)
        y = np.ldexp(xi, 1 - j)
        return self.psi(y / 2.0) - self.psi(y)

    def partial_sum(self, J: int, xi):
        """``sum_{j <= J} phi_j``; equals ``psi(2^-J xi)`` by telescoping."""
        return sum(self(j, xi) for j in range(J + 1))


def make_phi_family(j_max: int = 40) -> PhiFamily:
    if j_max < 1:
        raise ParameterError("j_max < 1")
    return PhiFamily(BumpPsi(), int(j_max))


@dataclass(frozen=True, eq=False)
class BandKernel:
    """Samples of ``K_j`` on ``x = m h`` for ``|m h| <= R``."""

    j: int
    h: float
    R: float
    samples: np.ndarray = field(repr=False)

    @property
    def x(self) -> np.ndarray:
        n = (self.samples.size - 1) // 2
        return np.arange(-n, n + 1) * self.h

    @property
    def scale(self) -> float:
        """Natural length unit, ``2^-(j-1)`` (``1`` for ``j = 0``)."""
        return 1.0 if self.j == 0 else math.ldexp(1.0, 1 - self.j)

    def integral(self) -> float:
        return float(np.sum(self.samples) * self.h)

    def __call__(self, x):
        """Linear interpolation of the samples; zero beyond the half-width."""
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > self.R * (1 + 1e-12)):
            raise ParameterError("evaluation point beyond kernel tabulation")
        n = (self.samples.size - 1) // 2
        return np.interp(x / self.h, np.arange(-n, n + 1), self.samples)


@lru_cache(maxsize=8)
def _base_table(j: int, h_K: float, R_K: float):
    """``K_j`` for ``j in {0, 1}`` by FFT on a period of ``4 R_K``."""
    fam = make_phi_family(1)
    n_half = int(round(R_K / h_K))
    N = 4 * n_half
    xi = np.fft.fftfreq(N, d=h_K) * 2.0 * np.pi
    k = np.fft.ifft(fam(j, xi)).real / h_K
    k = np.fft.fftshift(k)
    c = N // 2
    tail = np.max(np.abs(np.concatenate([k[: c - n_half], k[c + n_half + 1:]])))
    if tail >= TAIL_TOL:
        raise KernelTailError(f"kernel tail {tail:.2e} beyond R_K = {R_K} exceeds {TAIL_TOL:g}")
    out = k[c - n_half: c + n_half + 1].copy()
    out.setflags(write=False)
    return out


def make_band_kernel(family: PhiFamily, j: int, h_K: float = 2.0 ** -8, R_K: float = 512.0) -> BandKernel:
    """Tabulate ``K_j``.

    ``K_0`` and ``K_1`` come from an FFT of ``phi_0`` and ``phi_1``; higher
    levels use ``K_j(x) = 2^(j-1) K_1(2^(j-1) x)`` on the correspondingly
    finer grid, so the samples are those of ``K_1`` times ``2^(j-1)``.

    Raises
    ------
    ParameterError
        If the frequency grid does not resolve the support of ``phi_j``.
    KernelTailError
        If ``|K_j|`` exceeds ``1e-10`` outside the half-width.
    """
    if j < 0 or j > family.j_max:
        raise ParameterError(f"level {j} outside [0, {family.j_max}]")
    band = 1.5 if j == 0 else 3.0
    if not math.pi / h_K > band:
        raise ParameterError("Nyquist violation: h_K too coarse for the band of phi_j")
    base = _base_table(min(j, 1), float(h_K), float(R_K))
    if j <= 1:
        return BandKernel(j, h_K, R_K, base)
    s = math.ldexp(1.0, j - 1)
    samples = base * s
    samples.setflags(write=False)
    return BandKernel(j, h_K / s, R_K / s, samples)


# cubic Lagrange weights on the stencil (-1, 0, 1, 2), u in [0, 1)
def _lagrange4(u):
    return (
        -u * (u - 1.0) * (u - 2.0) / 6.0,
        (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
        -(u + 1.0) * u * (u - 2.0) / 2.0,
        (u + 1.0) * u * (u - 1.0) / 6.0,
    )


_GL_T, _GL_W = np.polynomial.legendre.leggauss(6)


def _breakpoints(Y: float, delta: float, depth: int) -> np.ndarray:
    m = int(math.ceil(Y / delta))
    cells = np.arange(-m, m + 1) * delta
    k_lo = int(math.floor(math.log2(delta))) - depth
    k_hi = int(math.ceil(math.log2(Y)))
    geo = (np.exp2(np.arange(k_lo, k_hi + 1))[:, None] * (1.0 + np.arange(16) / 16.0)[None, :]).ravel()
    geo = geo[geo < Y]
    pts = np.concatenate([cells, geo, -geo, [0.0]])
    return np.unique(pts)


def _moments(f: PointwiseFunction, Y: float, delta: float, depth: int, window: bool):
    """Interpolation moments ``c_m`` for ``m = m0 .. m0 + len - 1``."""
    bp = _breakpoints(Y, delta, depth)
    a, b = bp[:-1], bp[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = (mid[:, None] + half[:, None] * _GL_T[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    fv = f(y)
    if window:
        fv = fv * smooth_step((np.abs(y) - Y / 2) / (Y / 2))
    fw = w * fv
    t = y / delta
    i = np.floor(t)
    u = t - i
    i = i.astype(np.int64)
    m0 = int(i.min()) - 1
    n = int(i.max()) + 3 - m0
    c = np.zeros(n)
    for r, wr in enumerate(_lagrange4(u)):
        c += np.bincount(i - 1 + r - m0, weights=fw * wr, minlength=n)
    return m0, c


def _interp_uniform(G: np.ndarray, g0: int, delta: float, x: np.ndarray) -> np.ndarray:
    """Cubic interpolation of ``G[m - g0]`` (values at ``m delta``) at ``x``."""
    t = x / delta - g0
    ok = (t >= 1) & (t < G.size - 3)
    out = np.zeros_like(x)
    tt = t[ok]
    i = np.floor(tt)
    ii = i.astype(np.int64)
    ws = _lagrange4(tt - i)
    out[ok] = ws[0] * G[ii - 1] + ws[1] * G[ii] + ws[2] * G[ii + 1] + ws[3] * G[ii + 2]
    return out


def _block_at(f: PointwiseFunction, kernel: BandKernel, x: np.ndarray, num: Numerics) -> np.ndarray:
    if f.is_zero:
        return np.zeros_like(x)
    scale = kernel.scale
    delta = scale / num.oversample
    stride = delta / kernel.h
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise ParameterError("oversample incompatible with the kernel table spacing")
    stride = int(round(stride))
    n = (kernel.samples.size - 1) // 2
    nk = n // stride
    ks = kernel.samples[n - nk * stride: n + nk * stride + 1: stride]
    Y = f.support_radius
    window = False
    if kernel.j >= 1 and num.local_radius * scale < Y:
        Y = num.local_radius * scale
        window = True
    m0, c = _moments(f, Y, delta, num.depth, window)
    G = fftconvolve(c, ks)
    return _interp_uniform(G, m0 - nk, delta, x)


def band_convolve(f: PointwiseFunction, kernel: BandKernel, grid: LogDyadicGrid,
                  numerics: Optional[Numerics] = None) -> GridFunction:
    """``(K_j * f)(x)`` at every node of ``grid``.

    Parameters
    ----------
    f : PointwiseFunction
        Compactly supported; evaluated only at quadrature points.
    kernel : BandKernel
    grid : LogDyadicGrid
    numerics : Numerics, optional
        Supplies ``oversample``, ``local_radius`` and ``depth``.
    """
    num = Numerics() if numerics is None else numerics
    return GridFunction(grid, _block_at(f, kernel, np.asarray(grid.x), num))


def _eval_grid(num: Numerics) -> LogDyadicGrid:
    reach = num.R_K + 1.0
    k_max = max(num.k_max, int(math.ceil(math.log2(reach))) + 1)
    k_min = min(num.k_min, -num.j_max - 20)
    return build_grid(k_min, k_max, num.points_per_annulus)


_CACHE: dict = {}


def clear_cache():
    _CACHE.clear()


def fourier_block_values(f: PointwiseFunction, numerics: Optional[Numerics] = None):
    """Blocks ``K_j * f`` for ``j = 0..j_max`` on the evaluation grid.

    Returns
    -------
    grid : LogDyadicGrid
        The norm grid, extended outwards to cover the kernel reach.
    values : ndarray, shape (j_max + 1, N) or (j_max + 1, N/2)
        Positive nodes only when ``f`` has a parity.
    """
    num = Numerics() if numerics is None else numerics
    key = (f.spec, num.key()) if f.spec is not None else None
    if key is not None and key in _CACHE:
        return _CACHE[key]
    grid = _eval_grid(num)
    fam = make_phi_family(num.j_max)
    x = grid.x_pos if f.parity else grid.x
    rows = []
    for j in range(num.j_max + 1):
        ker = make_band_kernel(fam, j, num.h_K, num.R_K)
        rows.append(_block_at(f, ker, np.asarray(x), num))
    out = (grid, np.array(rows))
    if key is not None:
        _CACHE[key] = out
    return out


def fourier_block_norms(f: PointwiseFunction, p, alpha, numerics: Optional[Numerics] = None) -> np.ndarray:
    """``||K_j * f||_{L^p(|x|^alpha)}`` (annulus form) for ``j = 0..j_max``."""
    grid, vals = fourier_block_values(f, numerics)
    if f.parity:
        return dyadic_norms_pos(vals, grid, p, alpha, even=True)
    neg = vals[:, : grid.half][:, ::-1]
    pos = vals[:, grid.half:]
    return (dyadic_norms_pos(neg, grid, p, alpha, even=False) ** p
            + dyadic_norms_pos(pos, grid, p, alpha, even=False) ** p) ** (1.0 / p)


def besov_summands_fourier(f: PointwiseFunction, params: SpaceParams, j_max: Optional[int] = None,
                           numerics: Optional[Numerics] = None) -> SummandSequence:
    """``a_j = 2^(jsq) ||K_j * f||^q`` for ``j = 0..j_max``.

    For ``q = inf`` the stored values are ``2^(js) ||K_j * f||``.
    """
    validate_space(params)
    if params.n != 1:
        raise ParameterError("Besov summands are implemented for n = 1")
    num = Numerics() if numerics is None else numerics
    if j_max is not None:
        num = num.with_(j_max=int(j_max))
    norms = fourier_block_norms(f, params.p, params.alpha, num)
    j = np.arange(num.j_max + 1)
    s, q = float(params.s), float(params.q)
    with np.errstate(over="ignore", divide="ignore"):
        if math.isinf(q):
            vals = np.exp2(j * s) * norms
        else:
            vals = np.exp(q * (j * s * math.log(2.0) + np.log(np.where(norms > 0, norms, 1.0))))
            vals = np.where(norms > 0, vals, 0.0)
    return SummandSequence(FREQUENCY, j, vals, q)
