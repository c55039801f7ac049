"""Closed-form test functions and the power composition ``f -> |f|^mu``.

All evaluators are vectorized over numpy arrays and exact: no tabulation or
interpolation is involved.  Every catalog function is supported in
``|x| < e^{-2}`` with the default cutoffs.

Functions that are singular at the origin return ``0`` at ``x = 0``.  The
log-dyadic grid never contains the origin, but difference stencils can land
on it for some grid densities, and a single null-set value is harmless there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .params import ParameterError, LogParams, parse_real

__all__ = [
    "E2",
    "E3",
    "smooth_step",
    "CutoffTheta",
    "CutoffRho",
    "PointwiseFunction",
    "PeriodicProfile",
    "g_mu",
    "zero_function",
    "f_power_log",
    "f_log_log",
    "f_oscillatory",
    "f_linear_cutoff",
    "f_negative_power",
    "compose_power",
    "parse_function",
    "CATALOG",
]

E2 = math.exp(-2.0)
E3 = math.exp(-3.0)


def _g(t):
    out = np.zeros_like(t)
    m = t > 0
    out[m] = np.exp(-1.0 / t[m])
    return out


def smooth_step(t):
    """Infinitely smooth step: 1 for ``t <= 0``, 0 for ``t >= 1``.

    Uses the ratio ``g(1-t) / (g(1-t) + g(t))`` with ``g(t) = exp(-1/t)``.
    """
    t = np.asarray(t, dtype=float)
    a = _g(1.0 - t)
    b = _g(t)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = a / (a + b)
    return np.where(t <= 0, 1.0, np.where(t >= 1, 0.0, r))


@dataclass(frozen=True)
class CutoffTheta:
    """Radial cutoff: 1 on ``|x| <= inner_radius``, 0 on ``|x| >= vartheta``."""

    vartheta: float = E2
    inner_radius: float = E3

    def __post_init__(self):
        if not 0 < self.vartheta < 1:
            raise ParameterError("vartheta must lie in (0, 1)")
        if not 0 < self.inner_radius < self.vartheta:
            raise ParameterError("inner_radius must lie in (0, vartheta)")

    def __call__(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        return smooth_step((a - self.inner_radius) / (self.vartheta - self.inner_radius))

    @property
    def is_default(self) -> bool:
        return self.vartheta == E2 and self.inner_radius == E3


class CutoffRho:
    """The cutoff ``rho``: 1 for ``x <= e^-3`` and 0 for ``x >= e^-2``."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return smooth_step((x - E3) / (E2 - E3))


_RHO = CutoffRho()


@dataclass(frozen=True)
class PointwiseFunction:
    """An exact, vectorized pointwise evaluator with known support.

    Attributes
    ----------
    evaluator : callable
        Maps a float array to a float array of the same shape.
    support_radius : float
        The evaluator vanishes for ``|x| >= support_radius``.
    label : str
        Human-readable description.
    parity : {'even', 'odd', None}
        Symmetry under ``x -> -x`` if known.  Used to halve work.
    spec : str or None
        Canonical ``name:key=value`` string that rebuilds the function via
        :func:`parse_function`; ``None`` for ad-hoc functions.
    """

    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    support_radius: float
    label: str
    parity: Optional[str] = None
    spec: Optional[str] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        # masked branches evaluate log(0) etc. before np.where discards them
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(self.evaluator(x), dtype=float)

    @property
    def is_zero(self) -> bool:
        return self.support_radius == 0


def _abs_nonzero(x):
    a = np.abs(x)
    nz = a > 0
    return a, nz, np.where(nz, a, 1.0)


def zero_function() -> PointwiseFunction:
    """The zero function."""
    return PointwiseFunction(lambda x: np.zeros_like(x), 0.0, "0", "even", "zero")


def _theta_spec(theta: CutoffTheta) -> str:
    if theta.is_default:
        return ""
    return f",vartheta={theta.vartheta!r},inner={theta.inner_radius!r}"


def f_power_log(mu, delta, theta: Optional[CutoffTheta] = None) -> PointwiseFunction:
    """``theta(x) |x|^mu (-log|x|)^(-delta)``.

    Parameters
    ----------
    mu : real, nonzero
    delta : real, nonnegative
    theta : CutoffTheta, optional
        Defaults to ``CutoffTheta()`` (``vartheta = e^-2``).
    """
    theta = CutoffTheta() if theta is None else theta
    mu, delta = float(mu), float(delta)
    if mu == 0 and delta == 0:
        raise ParameterError("μ² + δ² > 0 required")
    if mu == 0:
        raise ParameterError("μ = 0 belongs to the iterated-logarithm family")
    if delta < 0:
        raise ParameterError("δ < 0")

    def ev(x):
        a, nz, safe = _abs_nonzero(x)
        logs = -np.log(safe)
        val = np.exp(mu * np.log(safe) - delta * np.log(np.where(nz, logs, 1.0)))
        return np.where(nz & (a < theta.vartheta), theta(a) * val, 0.0)

    return PointwiseFunction(
        ev,
        theta.vartheta,
        f"θ|x|^{mu:g}(-log|x|)^-{delta:g}",
        "even",
        f"f_power_log:mu={mu!r},delta={delta!r}{_theta_spec(theta)}",
    )


def f_log_log(lp: LogParams) -> PointwiseFunction:
    """``|log|x||^lambda |log|log|x|||^(-sigma) rho(|x|)``."""
    lam, sig = float(lp.lam), float(lp.sigma)

    def ev(x):
        a, nz, safe = _abs_nonzero(x)
        inside = nz & (a < E2)
        safe = np.where(inside, safe, E3)
        L = -np.log(safe)
        val = np.exp(lam * np.log(L) - sig * np.log(np.log(L)))
        return np.where(inside, _RHO(a) * val, 0.0)

    return PointwiseFunction(
        ev, E2, f"|log|x||^{lam:g}|loglog|^-{sig:g}ρ", "even", f"f_log_log:lam={lam!r},sigma={sig!r}"
    )


@dataclass(frozen=True)
class PeriodicProfile:
    """A bounded periodic profile ``g`` used by the oscillating functions."""

    func: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    name: str
    mu: Optional[float] = None

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


def g_mu(mu) -> PeriodicProfile:
    """``g_mu(t) = (sin^2(t/2))^(1/mu)``."""
    mu = float(mu)
    if mu <= 0:
        raise ParameterError("μ ≤ 0")
    return PeriodicProfile(lambda t: np.power(np.sin(t / 2.0) ** 2, 1.0 / mu), f"g_{mu:g}", mu)


def _one_profile() -> PeriodicProfile:
    return PeriodicProfile(lambda t: np.ones_like(t), "1", None)


def f_oscillatory(delta, beta, g: Optional[PeriodicProfile] = None) -> PointwiseFunction:
    """``|x|^delta g(|x|^-beta) rho(|x|)``; ``g`` defaults to ``g_1``."""
    delta, beta = float(delta), float(beta)
    if beta <= 0:
        raise ParameterError("β ≤ 0")
    g = g_mu(1.0) if g is None else g

    def ev(x):
        a, nz, safe = _abs_nonzero(x)
        inside = nz & (a < E2)
        safe = np.where(inside, safe, E3)
        ls = np.log(safe)
        val = np.exp(delta * ls) * g(np.exp(-beta * ls))
        return np.where(inside, _RHO(a) * val, 0.0)

    if g.mu is not None:
        gspec = f",mu={g.mu!r}"
    elif g.name == "1":
        gspec = ",profile=one"
    else:
        gspec = None
    spec = None if gspec is None else f"f_oscillatory:delta={delta!r},beta={beta!r}{gspec}"
    return PointwiseFunction(ev, E2, f"|x|^{delta:g}{g.name}(|x|^-{beta:g})ρ", "even", spec)


def f_linear_cutoff(theta: Optional[CutoffTheta] = None) -> PointwiseFunction:
    """``x theta(|x|)``."""
    theta = CutoffTheta() if theta is None else theta

    def ev(x):
        return np.where(np.abs(x) < theta.vartheta, x * theta(x), 0.0)

    return PointwiseFunction(ev, theta.vartheta, "xθ(|x|)", "odd", "f_linear_cutoff" + (":" + _theta_spec(theta)[1:] if _theta_spec(theta) else ""))


def f_negative_power(tau) -> PointwiseFunction:
    """``rho(|x|) |x|^(-tau)``, singular at the origin."""
    tau = float(tau)
    if tau <= 0:
        raise ParameterError("τ ≤ 0")

    def ev(x):
        a, nz, safe = _abs_nonzero(x)
        inside = nz & (a < E2)
        return np.where(inside, _RHO(a) * np.exp(-tau * np.log(safe)), 0.0)

    return PointwiseFunction(ev, E2, f"ρ|x|^-{tau:g}", "even", f"f_negative_power:tau={tau!r}")


def compose_power(f: PointwiseFunction, mu) -> PointwiseFunction:
    """``x -> |f(x)|^mu`` computed as ``exp(mu log|f|)`` with 0 at zeros of ``f``."""
    mu = float(mu)
    if mu <= 0:
        raise ParameterError("μ ≤ 0")

    def ev(x):
        v = np.abs(f(x))
        if mu == 1.0:
            return v
        nz = v > 0
        return np.where(nz, np.exp(mu * np.log(np.where(nz, v, 1.0))), 0.0)

    spec = None
    if f.spec is not None:
        spec = _add_power(f.spec, mu)
    parity = "even" if f.parity in ("even", "odd") else None
    return PointwiseFunction(ev, f.support_radius, f"|{f.label}|^{mu:g}", parity, spec)


def _add_power(spec: str, mu: float) -> str:
    name, kv = _split_spec(spec)
    if "power" in kv:
        mu = float(kv.pop("power")) * mu
    kv["power"] = repr(mu)
    return _join_spec(name, kv)


def _split_spec(spec: str):
    name, _, rest = spec.partition(":")
    kv = {}
    for part in filter(None, (x.strip() for x in rest.split(","))):
        if "=" not in part:
            raise ParameterError(f"malformed function parameter {part!r}")
        k, v = (y.strip() for y in part.split("=", 1))
        kv[k] = v
    return name.strip(), kv


def _join_spec(name: str, kv: dict) -> str:
    if not kv:
        return name
    return name + ":" + ",".join(f"{k}={v}" for k, v in kv.items())


def _theta_from(kv: dict) -> CutoffTheta:
    vt = float(parse_real(kv.pop("vartheta", repr(E2))))
    inner = float(parse_real(kv.pop("inner", repr(min(E3, vt / math.e)))))
    return CutoffTheta(vt, inner)


def _need(kv, *names):
    out = []
    for nm in names:
        if nm not in kv:
            raise ParameterError(f"missing function parameter {nm!r}")
        out.append(float(parse_real(kv.pop(nm))))
    return out


def _build(name: str, kv: dict) -> PointwiseFunction:
    if name == "zero":
        return zero_function()
    if name == "f_power_log":
        mu, = _need(kv, "mu")
        delta = float(parse_real(kv.pop("delta", "0")))
        return f_power_log(mu, delta, _theta_from(kv))
    if name == "f_log_log":
        lam, sig = _need(kv, "lam", "sigma")
        return f_log_log(LogParams(lam, sig))
    if name == "f_oscillatory":
        delta, beta = _need(kv, "delta", "beta")
        if kv.get("profile") == "one":
            kv.pop("profile")
            g = _one_profile()
        else:
            g = g_mu(float(parse_real(kv.pop("mu", "1"))))
        return f_oscillatory(delta, beta, g)
    if name == "f_linear_cutoff":
        return f_linear_cutoff(_theta_from(kv))
    if name == "f_negative_power":
        tau, = _need(kv, "tau")
        return f_negative_power(tau)
    raise ParameterError(f"unknown function {name!r}; known: {', '.join(CATALOG)}")


CATALOG = ("zero", "f_power_log", "f_log_log", "f_oscillatory", "f_linear_cutoff", "f_negative_power")


def parse_function(spec: str) -> PointwiseFunction:
    """Build a catalog function from ``name:key=value,...``.

    A ``power=mu`` entry composes the result with ``|.|^mu``.

    Examples
    --------
    >>> f = parse_function("f_power_log:mu=0.5,delta=0")
    >>> float(f(np.array([np.exp(-4.0)]))[0])  # doctest: +ELLIPSIS
    0.1353...
    """
    name, kv = _split_spec(spec)
    power = kv.pop("power", None)
    f = _build(name, kv)
    if kv:
        raise ParameterError(f"unknown parameters for {name}: {', '.join(sorted(kv))}")
    if power is not None:
        f = compose_power(f, float(parse_real(power)))
    return f
