"""Named verification suites: theory statements checked against numerics.

Every suite is a list of :class:`Case` records.  A case is evaluated by the
top-level function :func:`run_case`, so suites can be fanned out over a
process pool; :func:`run_suite` returns results in case order.

A case *agrees* when the numerical verdict matches the statement it checks.
Cases whose verdict rests on a power-law fit with exponent near 1 are marked
``borderline`` and do not count against the suite.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Numerics
from .diagnostics import (
    critical_sigma,
    fit_log_power,
    run_composition_experiment,
    run_membership_experiment,
    run_regularity_scan,
)
from .params import LogParams, SpaceParams, embedding_report, in_Uq

__all__ = [
    "SUITES",
    "Case",
    "CaseResult",
    "SuiteResult",
    "build_suite",
    "run_case",
    "run_suite",
    "BOURDAUD_NUMERICS",
]

SUITES = ("lemma-si", "lemma-bourdaud", "prop-key1", "thm1", "thm2", "thm3", "embeddings", "consistency")

SLOPE_TOL = 0.1
BORDERLINE_TOL = 0.25
LAMBDA_TOL = 0.15
SCAN_TOL = 0.07
CONSISTENCY_SLOPE = 0.15


def BOURDAUD_NUMERICS(base: Numerics) -> Numerics:
    """Deep frequency range for the doubly logarithmic functions.

    The ``(log j)^-sigma`` factor only separates from a pure power law over
    hundreds of levels.
    """
    return base.with_(j_max=max(base.j_max, 400), k_min=min(base.k_min, -425))


@dataclass(frozen=True)
class Case:
    """One check.  ``kind`` selects the evaluator in :func:`run_case`."""

    suite: str
    name: str
    kind: str
    fn: str
    params: SpaceParams
    numerics: Numerics
    extra: tuple = ()

    def opt(self, key, default=None):
        return dict(self.extra).get(key, default)


@dataclass(frozen=True)
class CaseResult:
    suite: str
    name: str
    expected: Optional[bool]
    observed: Optional[bool]
    agree: Optional[bool]
    borderline: bool = False
    detail: tuple = ()

    def line(self) -> str:
        tag = "borderline" if self.borderline else ("agree" if self.agree else "disagree")
        if self.agree is None and not self.borderline:
            tag = "undecided"
        info = " ".join(f"{k}={_fmt(v)}" for k, v in self.detail)
        return f"{self.name:<44} expected={_fmt(self.expected):<5} observed={_fmt(self.observed):<5} {tag:<10} {info}".rstrip()

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "case": self.name,
            "expected": self.expected,
            "observed": self.observed,
            "agree": self.agree,
            "borderline": self.borderline,
            "detail": {k: _json(v) for k, v in self.detail},
        }


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _json(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    cases: tuple

    @property
    def passed(self) -> bool:
        return all(c.agree is not False for c in self.cases if not c.borderline)

    def summary(self) -> str:
        n = len(self.cases)
        good = sum(1 for c in self.cases if c.agree)
        bl = sum(1 for c in self.cases if c.borderline)
        status = "PASS" if self.passed else "FAIL"
        return f"suite {self.suite}: {status} ({good}/{n} agree, {bl} borderline)"


# ---------------------------------------------------------------------------
# suite definitions


def _space(**kw) -> SpaceParams:
    base = dict(n=1, p=2, q=2, alpha=0, s=0.5)
    base.update(kw)
    return SpaceParams(**base)


def _lemma_si(num: Numerics) -> list:
    cases = []
    for mu in (0.5, 1.5):
        for delta in (0, 1):
            for a in (0, 0.5):
                crit = (1 + a) / 2 + mu
                for side, ds in (("below", -0.3), ("above", 0.3)):
                    P = _space(alpha=a, s=crit + ds)
                    fn = f"f_power_log:mu={mu},delta={delta}"
                    cases.append(Case("lemma-si", f"mu={mu} delta={delta} alpha={a} {side}", "membership",
                                      fn, P, num, (("slope_check", True),)))
    for q in (1.5, 3):
        for a in (0, 0.5):
            P = _space(alpha=a, q=q, s=(1 + a) / 2 + 0.5)
            cases.append(Case("lemma-si", f"boundary mu=0.5 delta=1 q={q} alpha={a}", "power_exponent",
                              "f_power_log:mu=0.5,delta=1", P, num.with_(j_max=max(num.j_max, 60)),
                              (("target", q * 1.0),)))
    return cases


def _lemma_bourdaud(num: Numerics) -> list:
    cases = []
    deep = BOURDAUD_NUMERICS(num)
    for sigma in (0.9, 0.3):
        for a in (0, 1):
            P = _space(alpha=a, q=2, s=(1 + a) / 2)
            cases.append(Case("lemma-bourdaud", f"lam=0.5 sigma={sigma} alpha={a}", "bourdaud",
                              f"f_log_log:lam=0.5,sigma={sigma}", P, deep))
    return cases


def _prop_key1(num: Numerics) -> list:
    cases = []
    for delta, beta, mu in ((1, 1, 0.5), (0.5, 2, 0.5)):
        for a in (0, 0.5):
            P = _space(alpha=a)
            star = (delta + (1 + a) / 2) / (beta + 1)
            cases.append(Case("prop-key1", f"delta={delta} beta={beta} mu={mu} alpha={a}", "scan",
                              f"f_oscillatory:delta={delta},beta={beta},mu={mu}", P, num,
                              (("sigma_star", star), ("M", 2))))
    return cases


def _thm1(num: Numerics) -> list:
    cases = []
    mu = 0.5
    for a in (0, 0.5):
        for s in (0.9, 1.25, 1.5):
            P = _space(alpha=a, s=s)
            cases.append(Case("thm1", f"mu={mu} alpha={a} s={s}", "composition", "f_linear_cutoff", P, num,
                              (("mu", mu), ("slope_target", mu + (1 + a) / 2 - s))))
    return cases


STEP1_INSIDE = (0.12, 0.135, 0.15, 0.165)
STEP1_OUTSIDE = (0.05, 0.28)
STEP2_INSIDE = (0.38, 0.42, 0.46, 0.52)
STEP2_OUTSIDE = (0.2, 0.75)


def _thm2(num: Numerics) -> list:
    cases = []
    P1 = _space(s=0.3)
    for tau in STEP1_INSIDE + STEP1_OUTSIDE:
        inside = tau in STEP1_INSIDE
        cases.append(Case("thm2", f"step1 tau={tau}", "composition", f"f_negative_power:tau={tau}", P1, num,
                          (("mu", 2), ("expect_signature", inside))))
    P2 = _space(s=0.8)
    for d in STEP2_INSIDE + STEP2_OUTSIDE:
        inside = d in STEP2_INSIDE
        cases.append(Case("thm2", f"step2 delta={d}", "composition", f"f_power_log:mu={d},delta=0", P2, num,
                          (("mu", 0.5), ("expect_signature", inside))))
    return cases


THM3_DRAWS = ((0.7, 1.0, 0.9), (0.65, 1.5, 1.1))


def _thm3(num: Numerics) -> list:
    cases = []
    for s, beta, delta in THM3_DRAWS:
        P = _space(alpha=0.5, s=s)
        cases.append(Case("thm3", f"s={s} beta={beta} delta={delta}", "composition",
                          f"f_oscillatory:delta={delta},beta={beta},mu=0.5", P, num,
                          (("mu", 0.5), ("expect_signature", True))))
    return cases


EMBEDDING_PAIRS = (
    (dict(alpha=0.5, s=1.0), dict(alpha=0, s=0.75)),
    (dict(alpha=0, s=0.9), dict(p=4, alpha=0, s=0.6)),
    (dict(alpha=1, s=1.2), dict(alpha=0.5, s=0.95)),
    (dict(alpha=0, s=0.9), dict(alpha=0, s=1.1)),
    (dict(alpha=0, s=0.7), dict(p=4, alpha=0, s=0.7)),
)


def _embeddings(num: Numerics) -> list:
    cases = []
    for i, (src, tgt) in enumerate(EMBEDDING_PAIRS):
        S, T = _space(**src), _space(**tgt)
        cases.append(Case("embeddings", f"pair{i} {_short(S)} -> {_short(T)}", "embedding",
                          "f_power_log:mu=0.5,delta=0", S, num, (("target", T),)))
    return cases


def _short(P: SpaceParams) -> str:
    return f"(p={float(P.p):g},a={float(P.alpha):g},s={float(P.s):g})"


def _consistency(num: Numerics) -> list:
    cases = []
    for c in _lemma_si(num):
        if c.kind == "membership":
            cases.append(Case("consistency", c.name, "consistency", c.fn, c.params, num))
    for a in (0, 0.5):
        for s in (0.9, 1.25, 1.5):
            cases.append(Case("consistency", f"|x theta|^0.5 alpha={a} s={s}", "consistency",
                              "f_linear_cutoff:power=0.5", _space(alpha=a, s=s), num))
    for tau in STEP1_INSIDE + STEP1_OUTSIDE:
        for fn in (f"f_negative_power:tau={tau}", f"f_negative_power:tau={tau},power=2"):
            cases.append(Case("consistency", fn, "consistency", fn, _space(s=0.3), num))
    for d in STEP2_INSIDE + STEP2_OUTSIDE:
        for fn in (f"f_power_log:mu={d},delta=0", f"f_power_log:mu={d},delta=0,power=0.5"):
            cases.append(Case("consistency", fn, "consistency", fn, _space(s=0.8), num))
    return cases


_BUILDERS = {
    "lemma-si": _lemma_si,
    "lemma-bourdaud": _lemma_bourdaud,
    "prop-key1": _prop_key1,
    "thm1": _thm1,
    "thm2": _thm2,
    "thm3": _thm3,
    "embeddings": _embeddings,
    "consistency": _consistency,
}


def build_suite(name: str, numerics: Optional[Numerics] = None) -> list:
    """Cases of the named suite."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return _BUILDERS[name](Numerics() if numerics is None else numerics)


# ---------------------------------------------------------------------------
# evaluation


def _membership(c: Case) -> CaseResult:
    cmp = run_membership_experiment(c.fn, c.params, "both", c.numerics)
    fo, di = cmp.fourier, cmp.differences
    e = c.params.critical + _mu_of(c.fn)
    fs, ds = fo.verdict.slope, di.slope_vs_scale
    s = float(c.params.s)
    slopes_ok = abs(fs - (s - e)) <= SLOPE_TOL and abs(ds - (e - s)) <= SLOPE_TOL
    bl = fo.verdict.borderline or di.verdict.borderline
    observed = fo.verdict.finite if fo.verdict.finite == di.verdict.finite else None
    agree = None if fo.predicted is None else (observed == fo.predicted and slopes_ok)
    return CaseResult(c.suite, c.name, fo.predicted, observed, agree, bl,
                      (("fourier_slope", fs), ("diff_slope", ds), ("expected_slope", s - e)))


def _mu_of(spec: str) -> float:
    from .testfns import _split_spec
    return float(_split_spec(spec)[1].get("mu", 0.0))


def _power_exponent(c: Case) -> CaseResult:
    rep = run_membership_experiment(c.fn, c.params, "fourier", c.numerics)
    v = rep.verdict
    target = c.opt("target")
    rho = v.power_exponent
    ok = rho is not None and abs(rho - target) <= BORDERLINE_TOL
    agree = ok and v.finite == rep.predicted
    return CaseResult(c.suite, c.name, rep.predicted, v.finite, agree, v.borderline,
                      (("rho", float("nan") if rho is None else rho), ("target", target)))


def _bourdaud(c: Case) -> CaseResult:
    rep = run_membership_experiment(c.fn, c.params, "fourier", c.numerics)
    from .testfns import _split_spec
    kv = _split_spec(c.fn)[1]
    lam, sig = float(kv["lam"]), float(kv["sigma"])
    lam_fit = fit_log_power(rep.summands, sig)
    expected = in_Uq(c.params.q, LogParams(lam, sig))
    lam_ok = abs(lam_fit - lam) <= LAMBDA_TOL
    v = rep.verdict
    agree = lam_ok and v.finite == expected
    return CaseResult(c.suite, c.name, expected, v.finite, agree, v.borderline,
                      (("lambda_fit", lam_fit), ("rho", float("nan") if v.power_exponent is None else v.power_exponent)))


def _scan(c: Case) -> CaseResult:
    M = c.opt("M", 2)
    grid = np.round(np.arange(0.05, M - 0.04, 0.05), 10)
    scan = run_regularity_scan(c.fn, c.params, grid, M, c.numerics)
    star = c.opt("sigma_star")
    loc = critical_sigma(scan)
    agree = loc is not None and abs(loc - star) <= SCAN_TOL
    return CaseResult(c.suite, c.name, True, agree, agree, False,
                      (("sigma_crossing", float("nan") if loc is None else loc), ("sigma_star", star)))


def _composition(c: Case) -> CaseResult:
    mu = c.opt("mu")
    rep = run_composition_experiment(c.fn, c.params, mu, "differences", c.numerics)
    sig = rep.signature
    detail = [("f_slope", rep.f.slope_vs_scale), ("fmu_slope", rep.composed.slope_vs_scale)]
    bl = rep.f.verdict.borderline or rep.composed.verdict.borderline
    target = c.opt("slope_target")
    if target is not None:
        # Result1 shape: |f|^mu diverges exactly when s >= mu + (1+alpha)/p
        expected = rep.composed.predicted
        slope_ok = abs(rep.composed.slope_vs_scale - target) <= SLOPE_TOL
        observed = rep.composed.verdict.finite
        agree = rep.f.verdict.finite and observed == expected and slope_ok
        detail.append(("slope_target", target))
        return CaseResult(c.suite, c.name, expected, observed, agree, bl, tuple(detail))
    expected = c.opt("expect_signature")
    pred = rep.predicted_signature
    agree = sig == expected and (pred is None or pred == expected)
    return CaseResult(c.suite, c.name, expected, sig, agree, bl, tuple(detail))


def _embedding(c: Case) -> CaseResult:
    T = c.opt("target")
    er = embedding_report(c.params, T)
    a = run_membership_experiment(c.fn, c.params, "differences", c.numerics)
    b = run_membership_experiment(c.fn, T, "differences", c.numerics)
    # an embedding must carry every observed member of the source into the target
    if er.holds:
        expected = True
        observed = (not a.verdict.finite) or b.verdict.finite
    else:
        expected = bool(a.predicted) and b.predicted is True
        observed = a.verdict.finite and b.verdict.finite
    bl = a.verdict.borderline or b.verdict.borderline
    return CaseResult(c.suite, c.name, expected, observed, expected == observed, bl,
                      (("embedding", er.holds), ("source_finite", a.verdict.finite),
                       ("target_finite", b.verdict.finite)))


def _consistency_case(c: Case) -> CaseResult:
    cmp = run_membership_experiment(c.fn, c.params, "both", c.numerics)
    fs, ds = cmp.fourier.verdict.slope, cmp.differences.verdict.slope
    decisive = abs(fs) > CONSISTENCY_SLOPE and abs(ds) > CONSISTENCY_SLOPE
    same = cmp.consistent
    return CaseResult(c.suite, c.name, cmp.fourier.verdict.finite, cmp.differences.verdict.finite,
                      same, not decisive,
                      (("fourier_slope", fs), ("diff_slope", ds)))


_RUNNERS = {
    "membership": _membership,
    "power_exponent": _power_exponent,
    "bourdaud": _bourdaud,
    "scan": _scan,
    "composition": _composition,
    "embedding": _embedding,
    "consistency": _consistency_case,
}


def run_case(case: Case) -> CaseResult:
    """Evaluate one case (top-level so that it pickles)."""
    return _RUNNERS[case.kind](case)


def run_cases(cases, jobs: int = 1) -> list:
    """Evaluate cases, serially or over ``jobs`` worker processes, in input order."""
    cases = list(cases)
    if jobs <= 1 or len(cases) <= 1:
        return [run_case(c) for c in cases]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(run_case, cases))


def run_suite(name: str, numerics: Optional[Numerics] = None, jobs: int = 1) -> SuiteResult:
    return SuiteResult(name, tuple(run_cases(build_suite(name, numerics), jobs)))
