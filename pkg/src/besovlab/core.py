"""Shared value types: numerical settings and summand sequences."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .grid import DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_POINTS

__all__ = ["Numerics", "SummandSequence", "FREQUENCY", "TIME"]

FREQUENCY = "FrequencyLevels"
TIME = "TimeLevels"


@dataclass(frozen=True)
class Numerics:
    """Every numerical knob that a verdict depends on.

    Attributes
    ----------
    k_min, k_max, points_per_annulus : int
        Log-dyadic grid used for norms and difference nodes.
    j_max : int
        Largest frequency level.
    l_min, l_max : int
        Time levels ``t = 2^-l``.
    quad_points : int
        Trapezoid nodes per sign for the offset integral of ball means.
    h_K, R_K : float
        Spacing and half-width of the tabulated kernels ``K_0`` and ``K_1``.
    oversample : int
        Convolution nodes per unit of the level's kernel scale.
    local_radius : float
        High levels are computed on ``|x| <= local_radius * 2^-(j-1)``.
    depth : int
        Octaves of geometric refinement below the convolution spacing.
    """

    k_min: int = DEFAULT_K_MIN
    k_max: int = DEFAULT_K_MAX
    points_per_annulus: int = DEFAULT_POINTS
    j_max: int = 40
    l_min: int = 1
    l_max: int = 40
    quad_points: int = 33
    h_K: float = 2.0 ** -8
    R_K: float = 512.0
    oversample: int = 16
    local_radius: float = 1024.0
    depth: int = 45

    def with_(self, **changes) -> "Numerics":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    def key(self) -> tuple:
        return tuple(asdict(self).values())


@dataclass(frozen=True)
class SummandSequence:
    """Nonnegative dyadic summands indexed by frequency or time level.

    For finite ``q`` the values are ``q``-th powers (``2^(jsq) ||.||^q``);
    for ``q = inf`` they are ``2^(js) ||.||``.
    """

    kind: str
    indices: np.ndarray
    values: np.ndarray
    q: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        val = np.asarray(self.values, dtype=float)
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("indices must be strictly increasing")
        if np.any(val < 0) or np.any(np.isnan(val)):
            raise ValueError("summands must be nonnegative")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @property
    def roots(self) -> np.ndarray:
        """``value^(1/q)``, i.e. ``2^(js)||.||``."""
        if math.isinf(self.q):
            return self.values
        return self.values ** (1.0 / self.q)

    def truncated_norm(self) -> float:
        """``(sum values)^(1/q)`` or ``max values`` for ``q = inf``."""
        if self.values.size == 0:
            return 0.0
        if math.isinf(self.q):
            return float(np.max(self.values))
        return float(np.sum(self.values) ** (1.0 / self.q))
