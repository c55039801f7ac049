"""Symmetric log-dyadic grids on the real line.

The grid is a union of dyadic annuli ``C_k = {2^(k-1) <= |x| < 2^k}`` for
``k = k_min, ..., k_max - 1`` with a fixed number of midpoint-rule nodes per
annulus on each side of the origin.  Midpoint nodes are dyadic rationals,
stay strictly inside the half-open annuli and never touch the origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .params import ParameterError

__all__ = [
    "DEFAULT_K_MIN",
    "DEFAULT_K_MAX",
    "DEFAULT_POINTS",
    "LogDyadicGrid",
    "GridFunction",
    "build_grid",
    "default_grid",
    "sample",
    "annulus_restrict",
]

DEFAULT_K_MIN = -60
DEFAULT_K_MAX = 2
DEFAULT_POINTS = 64


@dataclass(frozen=True, eq=False)
class LogDyadicGrid:
    """Nodes and weights of a symmetric log-dyadic grid.

    Attributes
    ----------
    k_min, k_max : int
        Annuli ``C_k`` with ``k_min <= k < k_max`` are covered, so every node
        satisfies ``2^(k_min-1) <= |x| < 2^(k_max-1)``.
    points_per_annulus : int
    x : ndarray
        Nodes in increasing order; the first half is negative.
    w : ndarray
        Positive quadrature weights.
    k : ndarray of int
        Annulus index of every node.
    """

    k_min: int
    k_max: int
    points_per_annulus: int
    x: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.x.size

    @property
    def half(self) -> int:
        """Index of the first positive node."""
        return self.x.size // 2

    @property
    def x_pos(self) -> np.ndarray:
        return self.x[self.half:]

    @property
    def w_pos(self) -> np.ndarray:
        return self.w[self.half:]

    @property
    def k_pos(self) -> np.ndarray:
        return self.k[self.half:]

    @property
    def annuli(self) -> range:
        return range(self.k_min, self.k_max)

    def key(self) -> tuple:
        return (self.k_min, self.k_max, self.points_per_annulus)

    def __eq__(self, other):
        return isinstance(other, LogDyadicGrid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


@lru_cache(maxsize=32)
def build_grid(k_min: int = DEFAULT_K_MIN, k_max: int = DEFAULT_K_MAX,
               points_per_annulus: int = DEFAULT_POINTS) -> LogDyadicGrid:
    """Build a symmetric log-dyadic grid.

    Parameters
    ----------
    k_min, k_max : int
        Annulus index range, ``k_min < k_max``.
    points_per_annulus : int
        Nodes per annulus and side, at least 2.

    Returns
    -------
    LogDyadicGrid
        With ``2 (k_max - k_min) points_per_annulus`` nodes.
    """
    if not k_min < k_max:
        raise ParameterError("k_min ≥ k_max")
    if points_per_annulus < 2:
        raise ParameterError("points_per_annulus < 2")
    m = int(points_per_annulus)
    ks = np.arange(k_min, k_max)
    frac = 1.0 + (np.arange(m) + 0.5) / m
    scale = np.ldexp(1.0, ks - 1)
    xp = (scale[:, None] * frac[None, :]).ravel()
    wp = np.repeat(scale / m, m)
    kp = np.repeat(ks, m)
    x = np.concatenate([-xp[::-1], xp])
    w = np.concatenate([wp[::-1], wp])
    k = np.concatenate([kp[::-1], kp])
    for a in (x, w, k):
        a.setflags(write=False)
    return LogDyadicGrid(int(k_min), int(k_max), m, x, w, k)


def default_grid() -> LogDyadicGrid:
    return build_grid(DEFAULT_K_MIN, DEFAULT_K_MAX, DEFAULT_POINTS)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function at the nodes of a :class:`LogDyadicGrid`."""

    grid: LogDyadicGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.x.shape:
            raise ValueError("values do not match the grid")
        object.__setattr__(self, "values", v)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def __mul__(self, c) -> "GridFunction":
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__


def sample(f, grid: LogDyadicGrid) -> GridFunction:
    """Evaluate ``f`` at every node.

    Raises
    ------
    FloatingPointError
        If any value is not finite.
    """
    v = np.asarray(f(grid.x), dtype=float)
    if not np.all(np.isfinite(v)):
        raise FloatingPointError("non-finite value at a grid node")
    return GridFunction(grid, v)


def annulus_restrict(gf: GridFunction, k: int) -> GridFunction:
    """Multiply by the indicator of ``C_k``."""
    g = gf.grid
    if not g.k_min <= k < g.k_max:
        raise ParameterError(f"annulus {k} outside [{g.k_min}, {g.k_max - 1}]")
    return GridFunction(g, np.where(g.k == k, gf.values, 0.0))
