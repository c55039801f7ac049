"""Classification of summand sequences and membership experiments.

A truncated summand sequence is classified from its trailing window:

* a clear exponential trend (``|slope| > 0.05`` for ``log2(value^(1/q))``
  against the index) gives a geometric (finite) or divergent verdict;
* otherwise a power law ``value ~ index^-rho`` is fitted and the sum is
  finite iff ``rho > 1`` (``q < inf``), or iff the tail stays bounded
  (``q = inf``).

Power-law fits with ``|rho - 1| < 0.1`` are flagged ``borderline``: the sum
is then decided by logarithmic factors that a finite window cannot resolve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import FREQUENCY, Numerics, SummandSequence
from .differences import MAX_ORDER, ball_mean_norms, besov_summands_diff
from .littlewood_paley import besov_summands_fourier
from .params import (
    LogParams,
    ParameterError,
    SpaceParams,
    compare,
    in_Uq,
    is_even_integer,
    parse_real,
    si_funct_member,
)
from .testfns import PointwiseFunction, compose_power, parse_function, _split_spec

__all__ = [
    "SLOPE_TOL",
    "BORDERLINE_RHO",
    "Verdict",
    "Prediction",
    "ExperimentReport",
    "MethodComparison",
    "CompositionReport",
    "ScanPoint",
    "classify",
    "predict_membership",
    "choose_order",
    "run_membership_experiment",
    "run_composition_experiment",
    "run_regularity_scan",
    "critical_sigma",
    "fit_log_power",
    "SummandSequence",
]

SLOPE_TOL = 0.05
BORDERLINE_RHO = 0.1
GEOMETRIC = "GeometricConvergent"
POWER = "PowerLaw"
DIVERGENT = "Divergent"


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`classify`.

    Attributes
    ----------
    cls : str
        ``GeometricConvergent``, ``PowerLaw`` or ``Divergent``.
    slope : float
        Fitted ``d log2(value^(1/q)) / d index`` on the window.
    power_exponent : float or None
        Fitted ``rho`` in ``value ~ index^-rho`` (power-law branch only).
    finite : bool
    borderline : bool
    window : tuple of int
        First and last index of the fit window.
    residual : float
        RMS residual of the slope fit.
    """

    cls: str
    slope: float
    power_exponent: Optional[float]
    finite: bool
    borderline: bool = False
    window: tuple = (0, 0)
    residual: float = 0.0

    def as_dict(self) -> dict:
        return {
            "class": self.cls,
            "slope": _num(self.slope),
            "power_exponent": _num(self.power_exponent),
            "finite": self.finite,
            "borderline": self.borderline,
        }


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def classify(seq: SummandSequence, window_fraction: float = 0.5, min_points: int = 8) -> Verdict:
    """Classify a summand sequence from its trailing window.

    Parameters
    ----------
    seq : SummandSequence
    window_fraction : float in (0, 1]
        Fraction of the points (from the end) used in the fits.
    min_points : int
        Minimum window size.

    Raises
    ------
    ValueError
        If the window has fewer than ``min_points`` points.

    Examples
    --------
    >>> j = np.arange(1, 41)
    >>> classify(SummandSequence("FrequencyLevels", j, 2.0 ** -j, 1)).cls
    'GeometricConvergent'
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    vals = seq.values
    idx = seq.indices
    if vals.size and np.all(vals == 0):
        return Verdict(GEOMETRIC, -math.inf, None, True, False, (int(idx[0]), int(idx[-1])), 0.0)
    n = int(math.ceil(window_fraction * vals.size))
    if n < min_points:
        raise ValueError(f"fit window has {n} points, need {min_points}")
    wi = idx[-n:].astype(float)
    wv = np.maximum(vals[-n:], 1e-300)
    q = seq.q
    roots = np.log2(wv) if math.isinf(q) else np.log2(wv) / q
    A = np.vstack([wi, np.ones_like(wi)]).T
    coef, *_ = np.linalg.lstsq(A, roots, rcond=None)
    slope = float(coef[0])
    resid = float(np.sqrt(np.mean((A @ coef - roots) ** 2)))
    window = (int(idx[-n]), int(idx[-1]))
    if slope < -SLOPE_TOL:
        return Verdict(GEOMETRIC, slope, None, True, False, window, resid)
    if slope > SLOPE_TOL:
        return Verdict(DIVERGENT, slope, None, False, False, window, resid)
    if np.any(wi <= 0):
        raise ValueError("power-law fit needs positive indices in the window")
    lx = np.log(wi)
    B = np.vstack([lx, np.ones_like(lx)]).T
    c2, *_ = np.linalg.lstsq(B, np.log(wv), rcond=None)
    rho = -float(c2[0])
    if math.isinf(q):
        finite = bool(np.max(wv) <= (1 + SLOPE_TOL) * np.median(np.maximum(vals, 1e-300)))
        borderline = False
    else:
        finite = rho > 1
        borderline = abs(rho - 1) < BORDERLINE_RHO
    return Verdict(POWER, slope, rho, finite, borderline, window, resid)


def fit_log_power(seq: SummandSequence, sigma: float, window_fraction: float = 0.5) -> float:
    """Fit ``lambda`` in ``value^(1/q) ~ c j^(lambda-1) (log j)^-sigma``.

    ``sigma`` is held fixed; the fit regresses ``log(root) + sigma log log j``
    on ``log j`` over the trailing window (indices must exceed 1).
    """
    n = int(math.ceil(window_fraction * seq.values.size))
    j = seq.indices[-n:].astype(float)
    if np.any(j <= 1):
        raise ValueError("log-power fit needs indices > 1")
    r = np.log(np.maximum(seq.roots[-n:], 1e-300)) + sigma * np.log(np.log(j))
    return float(np.polyfit(np.log(j), r, 1)[0]) + 1.0


# ---------------------------------------------------------------------------
# predictions


@dataclass(frozen=True)
class Prediction:
    """Predicted membership with the rule used and the critical index."""

    member: Optional[bool]
    rule: str
    critical: float = math.inf


def _spec_of(fn) -> str:
    if isinstance(fn, PointwiseFunction):
        if fn.spec is None:
            raise ParameterError("function has no catalog spec")
        return fn.spec
    return str(fn)


def _power_rule(params, mu, delta, what):
    crit = (params.n + params.alpha) / params.p + mu
    if delta == 0 and mu > 0 and is_even_integer(mu):
        return Prediction(True, f"{what}: even integer power of |x| is smooth", math.inf)
    return Prediction(si_funct_member(params, mu, delta), f"{what}: power-log rule", crit)


def predict_membership(fn, params: SpaceParams) -> Prediction:
    """Membership predicted by the theory for a catalog function spec.

    Returns ``member = None`` when no stated result decides the case.
    """
    name, kv = _split_spec(_spec_of(fn))
    kv = {k: float(parse_real(v)) if k != "profile" else v for k, v in kv.items()}
    nu = kv.pop("power", 1.0)
    n, p, q, s, a = params.n, params.p, params.q, params.s, params.alpha
    crit = (n + a) / p
    if name == "zero":
        return Prediction(True, "zero function", math.inf)
    if name == "f_power_log":
        return _power_rule(params, kv["mu"] * nu, kv.get("delta", 0.0) * nu, "f_power_log")
    if name == "f_negative_power":
        return _power_rule(params, -kv["tau"] * nu, 0.0, "f_negative_power")
    if name == "f_linear_cutoff":
        if nu == 1:
            return Prediction(True, "smooth compactly supported", math.inf)
        return _power_rule(params, nu, 0.0, "|x theta|^mu")
    if name == "f_log_log":
        lam, sig = kv["lam"] * nu, kv["sigma"] * nu
        c = compare(s, crit)
        if lam == 0 and sig == 0:
            return Prediction(True, "smooth cutoff", math.inf)
        if c < 0:
            return Prediction(True, "below the critical index", crit)
        if c == 0:
            if not q >= 1:
                return Prediction(None, "U_q needs q >= 1", crit)
            mem = in_Uq(q, LogParams(lam, sig))
            if not mem and a < 0:
                return Prediction(None, "U_q necessity needs alpha >= 0", crit)
            return Prediction(mem, "U_q rule at the critical index", crit)
        if a >= 0:
            return Prediction(False, "above the critical index (not Hoelder)", crit)
        return Prediction(None, "above the critical index with alpha < 0", crit)
    if name == "f_oscillatory":
        delta, beta = kv["delta"] * nu, kv["beta"]
        if kv.get("profile") == "one":
            return _power_rule(params, delta, 0.0, "f_oscillatory with g = 1")
        mu_g = kv.get("mu", 1.0)
        expo = 2.0 * nu / mu_g
        gamma = math.inf if is_even_integer(expo) else expo
        sigma = (delta + crit) / (beta + 1)
        ok = (-n < a < n * (p - 1)) and 0 < max(delta + n / p, delta + crit) < 2 * (beta + 1) and sigma < gamma
        if not ok:
            return Prediction(None, "oscillation rule hypotheses fail", sigma)
        c = compare(s, sigma)
        if c < 0:
            return Prediction(True, "below the oscillation exponent", sigma)
        if c == 0:
            return Prediction(True if math.isinf(q) else None, "at the oscillation exponent", sigma)
        return Prediction(False, "above the oscillation exponent", sigma)
    raise ParameterError(f"no prediction rule for {name!r}")


def choose_order(params: SpaceParams, critical: float = math.inf) -> int:
    """Difference order used by the experiments: ``floor(max(s, critical)) + 1``.

    Exceeding the critical index keeps the decay of ``||d^M_t f||`` from
    saturating at ``t^M``.
    """
    top = float(params.s) if not math.isfinite(critical) else max(float(params.s), float(critical))
    return int(min(MAX_ORDER, math.floor(top) + 1))


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentReport:
    """One function, one space, one characterization."""

    function: str
    label: str
    params: SpaceParams
    method: str
    numerics: Numerics
    summands: SummandSequence
    base_norm: float
    verdict: Verdict
    predicted: Optional[bool]
    rule: str
    order: Optional[int] = None

    @property
    def agree(self) -> Optional[bool]:
        if self.predicted is None:
            return None
        return self.predicted == self.verdict.finite

    @property
    def slope_vs_scale(self) -> float:
        """Slope of ``log2(summand^(1/q))`` against ``j`` (frequency levels)
        or against ``log2 t`` (time levels)."""
        return self.verdict.slope if self.summands.kind == FREQUENCY else -self.verdict.slope

    def to_json(self) -> dict:
        num = self.numerics.as_dict()
        if self.order is not None:
            num["M"] = self.order
        return {
            "function": self.function,
            "params": self.params.as_dict(),
            "method": self.method,
            "numerics": num,
            "summands": [{"index": int(i), "value": float(v)}
                         for i, v in zip(self.summands.indices, self.summands.values)],
            "base_norm": float(self.base_norm),
            "verdict": self.verdict.as_dict(),
            "predicted": self.predicted,
            "agree": self.agree,
        }


@dataclass(frozen=True)
class MethodComparison:
    fourier: ExperimentReport
    differences: ExperimentReport

    @property
    def consistent(self) -> bool:
        return self.fourier.verdict.finite == self.differences.verdict.finite

    def to_json(self) -> list:
        return [self.fourier.to_json(), self.differences.to_json()]


def _resolve(fn) -> PointwiseFunction:
    return fn if isinstance(fn, PointwiseFunction) else parse_function(str(fn))


def _one(f, params, method, numerics, order, pred, window_fraction):
    if method == "fourier":
        seq = besov_summands_fourier(f, params, numerics=numerics)
        from .differences import base_norm
        base = base_norm(f, params.p, params.alpha, numerics)
        M = None
    elif method == "differences":
        M = choose_order(params, pred.critical) if order is None else int(order)
        seq, base = besov_summands_diff(f, params, M, numerics=numerics)
    else:
        raise ParameterError(f"unknown method {method!r}")
    verdict = classify(seq, window_fraction)
    return ExperimentReport(f.spec or f.label, f.label, params, method, numerics, seq, base,
                            verdict, pred.member, pred.rule, M)


def run_membership_experiment(fn, params: SpaceParams, method: str = "both",
                              numerics: Optional[Numerics] = None, order: Optional[int] = None,
                              window_fraction: float = 0.5):
    """Compute summands, classify them and compare with the prediction.

    Parameters
    ----------
    fn : str or PointwiseFunction
        Catalog spec such as ``"f_power_log:mu=0.5,delta=0"``.
    method : {'fourier', 'differences', 'both'}
    order : int, optional
        Difference order; defaults to :func:`choose_order`.

    Returns
    -------
    ExperimentReport or MethodComparison
    """
    num = Numerics() if numerics is None else numerics
    f = _resolve(fn)
    try:
        pred = predict_membership(f, params)
    except (ParameterError, KeyError):
        pred = Prediction(None, "no rule", math.inf)
    method = {"diff": "differences", "both": "both"}.get(method, method)
    if method == "both":
        return MethodComparison(
            _one(f, params, "fourier", num, order, pred, window_fraction),
            _one(f, params, "differences", num, order, pred, window_fraction),
        )
    return _one(f, params, method, num, order, pred, window_fraction)


@dataclass(frozen=True)
class CompositionReport:
    """Verdicts for ``f`` and ``|f|^mu`` in the same space."""

    f: ExperimentReport
    composed: ExperimentReport
    mu: float

    @property
    def signature(self) -> bool:
        """``f`` finite and ``|f|^mu`` divergent."""
        return self.f.verdict.finite and not self.composed.verdict.finite

    @property
    def predicted_signature(self) -> Optional[bool]:
        a, b = self.f.predicted, self.composed.predicted
        if a is None or b is None:
            return None
        return a and not b


def run_composition_experiment(fn, params: SpaceParams, mu, method: str = "differences",
                               numerics: Optional[Numerics] = None, order: Optional[int] = None) -> CompositionReport:
    """Run the same membership experiment for ``f`` and ``|f|^mu``.

    Both use one grid and, for differences, one order ``M`` chosen to exceed
    the larger of the two critical indices.
    """
    f = _resolve(fn)
    g = compose_power(f, mu)
    if order is None and method in ("differences", "diff"):
        crits = []
        for h in (f, g):
            try:
                crits.append(predict_membership(h, params).critical)
            except (ParameterError, KeyError):
                pass
        finite = [c for c in crits if math.isfinite(c)]
        order = choose_order(params, max(finite) if finite else math.inf)
    rf = run_membership_experiment(f, params, method, numerics, order)
    rg = run_membership_experiment(g, params, method, numerics, order)
    return CompositionReport(rf, rg, float(mu))


@dataclass(frozen=True)
class ScanPoint:
    sigma: float
    sup_statistic: float
    slope: float


def run_regularity_scan(f, params_base: SpaceParams, sigma_grid: Iterable[float], M: int,
                        numerics: Optional[Numerics] = None, window_fraction: float = 0.5) -> list:
    """``sup_t t^-sigma ||d^M_t f||`` and its trend for each ``sigma``.

    The slope is that of ``log2(t^-sigma ||d^M_t f||)`` against ``log2 t``
    on the trailing window of levels; it is positive while the statistic
    stays bounded as ``t -> 0`` and changes sign at the critical ``sigma``.
    """
    f = _resolve(f)
    sig = [float(x) for x in sigma_grid]
    if any(not 0 < x < M for x in sig):
        raise ParameterError("scan requires 0 < sigma < M")
    levels, norms = ball_mean_norms(f, M, params_base.p, params_base.alpha, numerics)
    n = int(math.ceil(window_fraction * levels.size))
    out = []
    for s in sig:
        if np.all(norms == 0):
            out.append(ScanPoint(s, 0.0, math.inf))
            continue
        logs = levels * s + np.log2(np.maximum(norms, 1e-300))
        slope = -float(np.polyfit(levels[-n:], logs[-n:], 1)[0])
        out.append(ScanPoint(s, float(np.exp2(np.max(logs))), slope))
    return out


def critical_sigma(scan: Sequence[ScanPoint]) -> Optional[float]:
    """Location of the first sign change of the scan slope (linear interpolation)."""
    for a, b in zip(scan, scan[1:]):
        if a.slope > 0 >= b.slope:
            if a.slope == b.slope:
                return a.sigma
            return a.sigma + (b.sigma - a.sigma) * a.slope / (a.slope - b.slope)
    return None


def report_json(obj) -> str:
    """Deterministic JSON text for a report or list of reports."""
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    return json.dumps(obj, sort_keys=False, indent=2, allow_nan=False)
