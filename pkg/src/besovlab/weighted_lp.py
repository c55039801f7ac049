"""Power-weighted Lebesgue norms on log-dyadic grids.

Two discretizations of ``||g||_{L^p(|x|^alpha)}`` are provided:

* the direct quadrature ``(sum_i w_i |g(x_i)|^p |x_i|^alpha)^(1/p)``;
* the annulus form ``(sum_k 2^(k alpha) ||g chi_k||_p^p)^(1/p)``, which is
  equivalent up to the factor ``2^(|alpha|/p)`` and is the default inside
  Besov computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, LogDyadicGrid
from .params import ParameterError

__all__ = ["WeightedNorm", "lp_norm_direct", "lp_norm_dyadic", "dyadic_norms_pos", "SPHERE_AREA"]

# surface measure of the unit sphere in R^n
SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


@dataclass(frozen=True)
class WeightedNorm:
    value: float
    method: str  # "direct" or "dyadic"
    p: float
    alpha: float


def _check(p, alpha, n):
    if p < 1:
        raise ParameterError("p < 1")
    if not alpha > -n:
        raise ParameterError("α ≤ −n")


def lp_norm_direct(gf: GridFunction, p, alpha, n: int = 1) -> WeightedNorm:
    """Direct quadrature of the weighted norm.

    For ``n >= 2`` the values on the positive nodes are taken as a radial
    profile and the polar-coordinate factor ``|S^(n-1)| r^(n-1)`` is applied.
    """
    _check(p, alpha, n)
    g = gf.grid
    if n == 1:
        x, w, v = g.x, g.w, gf.values
        total = np.sum(w * np.abs(v) ** p * np.abs(x) ** alpha)
    else:
        if n not in SPHERE_AREA:
            raise ParameterError("radial reduction is available for n ≤ 3")
        x, w, v = g.x_pos, g.w_pos, gf.values[g.half:]
        total = SPHERE_AREA[n] * np.sum(w * np.abs(v) ** p * x ** (alpha + n - 1))
    return WeightedNorm(float(total ** (1.0 / p)), "direct", p, alpha)


def lp_norm_dyadic(gf: GridFunction, p, alpha) -> WeightedNorm:
    """Annulus form ``(sum_k 2^(k alpha) ||g chi_k||_p^p)^(1/p)`` (``n = 1``)."""
    _check(p, alpha, 1)
    g = gf.grid
    per = np.bincount(g.k - g.k_min, weights=g.w * np.abs(gf.values) ** p,
                      minlength=g.k_max - g.k_min)
    ks = np.arange(g.k_min, g.k_max)
    total = np.sum(np.exp2(ks * float(alpha)) * per)
    return WeightedNorm(float(total ** (1.0 / p)), "dyadic", p, alpha)


def dyadic_norms_pos(values: np.ndarray, grid: LogDyadicGrid, p, alpha, even: bool = True) -> np.ndarray:
    """Annulus-form norms for a stack of functions given on positive nodes.

    Parameters
    ----------
    values : ndarray, shape (L, N/2)
        Row ``l`` holds a function on ``grid.x_pos``.
    even : bool
        If true the functions are taken to be even or odd, so the negative
        half contributes the same amount.  Otherwise only ``x > 0`` is used.

    Returns
    -------
    ndarray, shape (L,)
    """
    values = np.atleast_2d(values)
    m = grid.points_per_annulus
    nk = grid.k_max - grid.k_min
    w = grid.w_pos.reshape(nk, m)
    # plain reductions, not BLAS, so results do not depend on thread count
    per = np.sum(np.abs(values.reshape(values.shape[0], nk, m)) ** p * w[None], axis=2)
    ks = np.arange(grid.k_min, grid.k_max)
    total = np.sum(per * np.exp2(ks * float(alpha))[None, :], axis=1)
    if even:
        total = 2.0 * total
    return total ** (1.0 / p)
