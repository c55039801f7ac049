"""Finite differences, ball means and difference-side Besov summands.

Roundoff guard
--------------
At offsets far smaller than ``|x|`` the binomial sum cancels to the level of
rounding noise.  Such entries (``|D| < 2^10 eps sum_j C(M,j)|f(x_j)|``) are
recomputed from a larger offset ``H = 2^r h`` centred on the same stencil
midpoint, using ``Delta^M_h f(x) ~ (h/H)^M Delta^M_H f(x + M(h-H)/2)``.  The
substitute is accepted only when ``H <= |x|/64`` and the estimates from
``H`` and ``2H`` agree to 5%, so non-smooth or oscillating stencils keep the
plain value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .core import TIME, Numerics, SummandSequence
from .grid import build_grid
from .params import ParameterError, SpaceParams, derived_indices, validate_space
from .testfns import PointwiseFunction
from .weighted_lp import dyadic_norms_pos

__all__ = [
    "MAX_ORDER",
    "TimeLevels",
    "difference",
    "iterated_difference",
    "stable_difference",
    "ball_mean",
    "default_order",
    "ball_mean_norms",
    "besov_summands_diff",
    "base_norm",
    "clear_cache",
]

MAX_ORDER = 8
_EPS = np.finfo(float).eps
_NOISE = 2.0 ** 10 * _EPS


def _check_order(M):
    if not isinstance(M, (int, np.integer)) or not 1 <= M <= MAX_ORDER:
        raise ParameterError(f"difference order must be an integer in [1, {MAX_ORDER}]")
    return int(M)


@dataclass(frozen=True)
class TimeLevels:
    """Levels ``t_l = 2^-l`` for ``l_min <= l <= l_max``."""

    l_min: int = 1
    l_max: int = 40

    def __post_init__(self):
        if not 1 <= self.l_min <= self.l_max:
            raise ParameterError("time levels need 1 ≤ l_min ≤ l_max")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.l_min, self.l_max + 1)

    @property
    def t(self) -> np.ndarray:
        return np.exp2(-self.levels.astype(float))


def difference(f, M: int, h, x):
    """``Delta^M_h f(x) = sum_j (-1)^j C(M,j) f(x + (M-j) h)``."""
    M = _check_order(M)
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    out = 0.0
    for j in range(M + 1):
        out = out + (-1) ** j * comb(M, j) * np.asarray(f(x + (M - j) * h), dtype=float)
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite difference")
    return out if out.ndim else float(out)


def iterated_difference(f, M: int, h, x):
    """``Delta^M_h`` by the recursion ``Delta_h (Delta^(M-1)_h f)``."""
    M = _check_order(M)
    if M == 1:
        return np.asarray(f(np.asarray(x) + h), dtype=float) - np.asarray(f(x), dtype=float)
    return iterated_difference(f, M - 1, h, np.asarray(x) + h) - iterated_difference(f, M - 1, h, x)


def _raw(f, M, x, h):
    d = np.zeros(np.broadcast(x, h).shape)
    s = np.zeros_like(d)
    for j in range(M + 1):
        v = f(x + (M - j) * h)
        c = comb(M, j)
        d += (-1) ** j * c * v
        s += c * np.abs(v)
    return d, s


def stable_difference(f, M: int, x, h):
    """Binomial difference with the roundoff guard described in the module docs.

    ``x`` and ``h`` broadcast against each other.
    """
    M = _check_order(M)
    x, h = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(h, dtype=float))
    d, s = _raw(f, M, x, h)
    # the binomial sum at h = 0 leaves an O(eps |f|) residue
    d = np.where(h == 0, 0.0, d)
    noisy = (np.abs(d) < _NOISE * s) & (h != 0)
    if not np.any(noisy):
        return d
    xs, hs = x[noisy], h[noisy]
    ax, ah = np.abs(xs), np.abs(hs)
    target = ax * (2.0 ** (12 + M) * _EPS) ** (1.0 / M)
    r = np.maximum(1, np.ceil(np.log2(np.maximum(target, ah) / ah)) - 1)
    est = d[noisy].copy()
    pending = np.ones(xs.size, dtype=bool)
    for _ in range(64):
        if not np.any(pending):
            break
        H = hs[pending] * np.exp2(r[pending])
        ok_size = 64.0 * np.abs(H) <= ax[pending]
        xp = xs[pending] + M * (hs[pending] - H) / 2.0
        d1, s1 = _raw(f, M, xp, H)
        x2 = xs[pending] + M * (hs[pending] - 2.0 * H) / 2.0
        d2, _ = _raw(f, M, x2, 2.0 * H)
        ratio = (hs[pending] / H) ** M
        e1 = ratio * d1
        e2 = ratio * d2 / 2.0 ** M
        clean = np.abs(d1) >= _NOISE * s1
        agree = np.abs(e1 - e2) <= 0.05 * np.abs(e1)
        idx = np.flatnonzero(pending)
        accept = clean & agree & ok_size
        give_up = ~ok_size | (clean & ~agree)
        # on give-up the scaled value still bounds the true difference
        # (|Delta^M_h f| <= h^M sup|f^(M)|) far better than the raw residue
        done = accept | give_up
        est[idx[done]] = e1[done]
        pending[idx[done]] = False
        r[idx[~done]] += 1
    d = d.copy()
    d[noisy] = est
    return d


def _offsets(t: float, quad_points: int):
    if quad_points < 2:
        raise ParameterError("quad_points < 2")
    n = quad_points - 1
    h = np.arange(-n, n + 1) * (t / n)
    w = np.full(h.size, t / n)
    w[0] *= 0.5
    w[-1] *= 0.5
    return h, w


def ball_mean(f, M: int, t, x, quad_points: int = 33, stabilize: bool = True):
    """``d^M_t f(x) = (1/t) int_{-t}^{t} |Delta^M_h f(x)| dh``.

    Composite trapezoid with ``quad_points`` nodes per sign.  ``x`` may be
    an array.
    """
    M = _check_order(M)
    if not t > 0:
        raise ParameterError("t ≤ 0")
    x = np.asarray(x, dtype=float)
    h, w = _offsets(float(t), quad_points)
    xx = x.reshape(-1, 1)
    if stabilize:
        D = stable_difference(f, M, xx, h[None, :])
    else:
        D = _raw(f, M, xx, h[None, :])[0]
    out = np.sum(np.abs(D) * w[None, :], axis=1) / t
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)


def default_order(s) -> int:
    """``floor(s) + 1`` capped at 2."""
    return min(int(math.floor(float(s))) + 1, 2)


_CACHE: dict = {}


def clear_cache():
    _CACHE.clear()


def _node_grid(num: Numerics):
    k_min = min(num.k_min, -num.l_max - 20)
    return build_grid(k_min, num.k_max, num.points_per_annulus)


def ball_mean_values(f: PointwiseFunction, M: int, numerics: Optional[Numerics] = None):
    """``d^M_t f`` at the grid nodes for every time level.

    Returns
    -------
    grid : LogDyadicGrid
    levels : ndarray of int
    values : ndarray, shape (L, N/2) for even/odd ``f`` else (L, N)
    """
    M = _check_order(M)
    num = Numerics() if numerics is None else numerics
    key = (f.spec, M, num.key()) if f.spec is not None else None
    if key is not None and key in _CACHE:
        return _CACHE[key]
    grid = _node_grid(num)
    lv = TimeLevels(num.l_min, num.l_max)
    x = np.asarray(grid.x_pos if f.parity else grid.x)
    rows = []
    for t in lv.t:
        row = np.zeros_like(x)
        if not f.is_zero:
            live = np.abs(x) < f.support_radius + M * t
            row[live] = ball_mean(f, M, t, x[live], num.quad_points)
        rows.append(row)
    out = (grid, lv.levels, np.array(rows))
    if key is not None:
        _CACHE[key] = out
    return out


def _norms(vals, grid, p, alpha, even):
    if even:
        return dyadic_norms_pos(vals, grid, p, alpha, even=True)
    neg = vals[:, : grid.half][:, ::-1]
    pos = vals[:, grid.half:]
    return (dyadic_norms_pos(neg, grid, p, alpha, even=False) ** p
            + dyadic_norms_pos(pos, grid, p, alpha, even=False) ** p) ** (1.0 / p)


def ball_mean_norms(f: PointwiseFunction, M: int, p, alpha, numerics: Optional[Numerics] = None):
    """``||d^M_t f||_{L^p(|x|^alpha)}`` (annulus form) per time level."""
    grid, levels, vals = ball_mean_values(f, M, numerics)
    return levels, _norms(vals, grid, p, alpha, bool(f.parity))


def base_norm(f: PointwiseFunction, p, alpha, numerics: Optional[Numerics] = None) -> float:
    """``||f||_{L^p(|x|^alpha)}`` (annulus form) on the node grid."""
    num = Numerics() if numerics is None else numerics
    grid = _node_grid(num)
    x = grid.x_pos if f.parity else grid.x
    return float(_norms(np.abs(f(x))[None, :], grid, p, alpha, bool(f.parity))[0])


def besov_summands_diff(f: PointwiseFunction, params: SpaceParams, M: Optional[int] = None,
                        levels: Optional[TimeLevels] = None, numerics: Optional[Numerics] = None):
    """``b_l = 2^(lsq) ||d^M_{2^-l} f||^q`` and the base term ``||f||``.

    Parameters
    ----------
    M : int, optional
        Difference order; defaults to :func:`default_order`.
    levels : TimeLevels, optional
        Overrides ``numerics.l_min`` and ``numerics.l_max``.

    Returns
    -------
    (SummandSequence, float)
    """
    validate_space(params)
    if params.n != 1:
        raise ParameterError("Besov summands are implemented for n = 1")
    M = default_order(params.s) if M is None else _check_order(M)
    if not params.s < M:
        raise ParameterError("s ≥ M: the ball-means characterization needs s < M")
    if not params.s > derived_indices(params).lower_bound:
        raise ParameterError("s ≤ max(σ_p, α/p − α₀)")
    num = Numerics() if numerics is None else numerics
    if levels is not None:
        num = num.with_(l_min=levels.l_min, l_max=levels.l_max)
    lv, norms = ball_mean_norms(f, M, params.p, params.alpha, num)
    s, q = float(params.s), float(params.q)
    with np.errstate(divide="ignore", over="ignore"):
        if math.isinf(q):
            vals = np.exp2(lv * s) * norms
        else:
            pos = norms > 0
            vals = np.where(pos, np.exp(q * (lv * s * math.log(2.0) + np.log(np.where(pos, norms, 1.0)))), 0.0)
    seq = SummandSequence(TIME, lv, vals, q)
    return seq, base_norm(f, params.p, params.alpha, num)
