import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besovlab.core import Numerics, SummandSequence
from besovlab.diagnostics import (
    DIVERGENT,
    GEOMETRIC,
    POWER,
    ExperimentReport,
    MethodComparison,
    choose_order,
    classify,
    critical_sigma,
    fit_log_power,
    predict_membership,
    report_json,
    run_composition_experiment,
    run_membership_experiment,
    run_regularity_scan,
)
from besovlab.params import ParameterError, SpaceParams
from besovlab.testfns import f_power_log, zero_function

J = np.arange(1, 41)


def seq(values, q=1.0, indices=None):
    idx = J if indices is None else indices
    return SummandSequence("FrequencyLevels", idx, np.asarray(values, dtype=float), q)


def test_classify_examples():
    v = classify(seq(2.0 ** -J))
    assert v.cls == GEOMETRIC and v.finite and v.slope == pytest.approx(-1, abs=1e-9)
    j = np.arange(1, 101)  # the slope 2/(j ln 2) drops below 0.05 only past j ~ 60
    v = classify(seq(j ** -2.0, indices=j))
    assert v.cls == POWER and v.finite and v.power_exponent == pytest.approx(2, abs=0.1)
    v = classify(seq(np.ones(40)))
    assert v.cls == POWER and not v.finite and v.power_exponent == pytest.approx(0, abs=1e-12)


def test_classify_divergent_and_zero():
    assert classify(seq(2.0 ** (0.5 * J))).cls == DIVERGENT
    v = classify(seq(np.zeros(40)))
    assert v.cls == GEOMETRIC and v.slope == -math.inf and v.finite


def test_classify_errors():
    with pytest.raises(ValueError):
        classify(seq(np.ones(10), indices=np.arange(10)))
    with pytest.raises(ValueError):
        classify(seq(np.ones(40)), window_fraction=0)


def test_classify_q_infinity_boundedness():
    assert classify(seq(np.ones(40), q=math.inf)).finite
    grow = classify(seq(np.log(J + 1.0), q=math.inf))
    assert grow.cls == POWER and not grow.finite


def test_borderline_flag():
    j = np.arange(1, 101)
    v = classify(seq(j ** -1.02, indices=j))
    assert v.borderline and v.cls == POWER


def test_root_slope_uses_q():
    v = classify(seq(2.0 ** (-3 * J), q=3))
    assert v.slope == pytest.approx(-1, abs=1e-9)


laws = st.one_of(
    st.tuples(st.just("geo"), st.floats(-2, 2).filter(lambda r: abs(r) > 0.1)),
    st.tuples(st.just("pow"), st.floats(0, 4)),
)


def law_values(kind, r, idx):
    return np.exp2(r * idx) if kind == "geo" else idx.astype(float) ** -r


@settings(max_examples=80, deadline=None)
@given(law=laws, c=st.floats(1e-6, 1e6), q=st.sampled_from([1.0, 2.0, 0.5, math.inf]))
def test_scale_invariance(law, c, q):
    a = classify(seq(law_values(*law, J), q))
    b = classify(seq(c * law_values(*law, J), q))
    assert a.cls == b.cls and a.finite == b.finite
    assert b.slope == pytest.approx(a.slope, abs=1e-9)


# rho = 1 exactly is the knife edge where finiteness is decided by roundoff
shift_laws = st.one_of(
    st.tuples(st.just("geo"), st.floats(-2, 2).filter(lambda r: abs(r) > 0.1)),
    st.tuples(st.just("pow"), st.floats(0, 1.5).filter(lambda r: abs(r - 1) > 0.01)),
)


@settings(max_examples=80, deadline=None)
@given(law=shift_laws, k=st.integers(1, 40), junk=st.floats(0, 1e3))
def test_index_shift_equivariance(law, k, junk):
    idx = np.arange(41, 81)
    a = classify(seq(law_values(*law, idx), indices=idx))
    full = np.arange(41 - k, 81)
    vals = np.concatenate([np.full(k, junk), law_values(*law, idx)])
    b = classify(seq(vals, indices=full))
    assert a.cls == b.cls and a.finite == b.finite
    if law[0] == "geo":
        assert b.slope == pytest.approx(a.slope, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(v=st.lists(st.floats(1e-8, 1e8), min_size=16, max_size=60), q=st.sampled_from([1.0, 2.0, math.inf]))
def test_verdict_invariants(v, q):
    out = classify(seq(v, q, indices=np.arange(1, len(v) + 1)))
    if out.cls == GEOMETRIC:
        assert out.finite
    if out.cls == DIVERGENT:
        assert not out.finite
    if out.cls == POWER and not math.isinf(q):
        assert out.finite == (out.power_exponent > 1)


def test_fit_log_power_exact():
    j = np.arange(2, 200)
    vals = (j ** (0.6 - 1.0) * np.log(j) ** -0.9) ** 2
    s = SummandSequence("FrequencyLevels", j, vals, 2)
    assert fit_log_power(s, 0.9) == pytest.approx(0.6, abs=1e-10)


def test_predictions():
    P = SpaceParams(p=2, q=2, alpha=0)
    assert predict_membership("f_power_log:mu=0.5,delta=0", P.with_(s=0.7)).member
    assert not predict_membership("f_power_log:mu=0.5,delta=0", P.with_(s=1.3)).member
    assert predict_membership("f_power_log:mu=0.5,delta=0", P.with_(s=1.0, q=math.inf)).member
    assert predict_membership("f_log_log:lam=0,sigma=1", P.with_(s=0.5, q=1)).member
    assert predict_membership("f_log_log:lam=0.5,sigma=0.9", P.with_(s=0.5)).member
    assert not predict_membership("f_log_log:lam=0.5,sigma=0.3", P.with_(s=0.5)).member
    assert predict_membership("f_power_log:mu=1,delta=0,power=2", P.with_(s=5)).member
    assert predict_membership("zero", P.with_(s=9)).member
    lin = predict_membership("f_linear_cutoff:power=0.5", P.with_(s=1.25, alpha=0.5))
    assert lin.member is False and lin.critical == pytest.approx(1.25)


def test_oscillatory_prediction():
    pr = predict_membership("f_oscillatory:delta=1,beta=1,mu=0.5", SpaceParams(p=2, q=2, s=0.7))
    assert pr.member and pr.critical == pytest.approx(0.75)
    assert predict_membership("f_oscillatory:delta=1,beta=1,mu=0.5", SpaceParams(p=2, q=2, s=0.8)).member is False


def test_prediction_rejects_unknown():
    with pytest.raises(ParameterError):
        predict_membership(zero_function().__class__(np.abs, 1.0, "anon"), SpaceParams(s=0.5))


def test_choose_order():
    assert choose_order(SpaceParams(s=0.7)) == 1
    assert choose_order(SpaceParams(s=0.7), 1.0) == 2
    assert choose_order(SpaceParams(s=20)) == 8


@pytest.fixture(scope="module")
def low():
    return run_membership_experiment("f_power_log:mu=0.5,delta=0", SpaceParams(p=2, q=2, s=0.7), "both")


def test_membership_below_boundary(low):
    assert isinstance(low, MethodComparison) and low.consistent
    for r in (low.fourier, low.differences):
        assert r.predicted and r.verdict.finite and r.agree


def test_membership_above_boundary():
    r = run_membership_experiment("f_power_log:mu=0.5,delta=0", SpaceParams(p=2, q=2, s=1.3), "diff")
    assert r.predicted is False and r.verdict.cls == DIVERGENT and r.agree


def test_log_log_example_trends_to_eps_decay():
    P = SpaceParams(p=2, q=2, s=0.5)
    lam = []
    for jm in (40, 80):
        r = run_membership_experiment("f_log_log:lam=0.5,sigma=0.9", P, "fourier",
                                      numerics=Numerics(j_max=jm, k_min=-jm - 20))
        assert r.predicted and r.verdict.cls == POWER
        lam.append(fit_log_power(r.summands, 0.9))
    # slow approach of the fitted lambda to 1 - 1/q
    assert lam[1] < lam[0] and abs(lam[1] - 0.5) < 0.25


def test_json_schema(low):
    doc = json.loads(report_json(low.differences))
    assert list(doc) == ["function", "params", "method", "numerics", "summands", "base_norm",
                         "verdict", "predicted", "agree"]
    assert set(doc["verdict"]) >= {"class", "slope", "power_exponent", "finite"}
    assert doc["numerics"]["M"] == low.differences.order
    assert set(doc["summands"][0]) == {"index", "value"}
    assert len(json.loads(report_json(low))) == 2


def test_report_agree_none():
    r = run_membership_experiment("f_oscillatory:delta=1,beta=1,mu=0.5", SpaceParams(p=2, q=2, s=0.75), "fourier",
                                  numerics=Numerics(j_max=16))
    assert isinstance(r, ExperimentReport) and r.predicted is None and r.agree is None


@pytest.mark.parametrize("fn,mu,P", [
    ("f_linear_cutoff", 0.5, SpaceParams(p=2, q=2, alpha=0.5, s=1.25)),
    ("f_negative_power:tau=0.15", 2, SpaceParams(p=2, q=2, s=0.3)),
    ("f_power_log:mu=0.45,delta=0", 0.5, SpaceParams(p=2, q=2, s=0.8)),
])
def test_composition_examples(fn, mu, P):
    rep = run_composition_experiment(fn, P, mu)
    assert rep.predicted_signature and rep.signature
    assert rep.f.order == rep.composed.order


def test_signature_stable_under_refinement():
    P = SpaceParams(p=2, q=2, alpha=0.5, s=1.25)
    num = Numerics().with_(points_per_annulus=128)
    num = num.with_(l_max=2 * num.l_max, k_min=-2 * num.l_max - 20)
    assert run_composition_experiment("f_linear_cutoff", P, 0.5, numerics=num).signature


def test_scan_zero():
    scan = run_regularity_scan(zero_function(), SpaceParams(p=2), [0.5, 1.0, 1.5], 2)
    assert [p.sup_statistic for p in scan] == [0, 0, 0]


def test_scan_rejects_sigma_range():
    with pytest.raises(ParameterError):
        run_regularity_scan(zero_function(), SpaceParams(p=2), [2.0], 2)


def test_scan_oscillatory_critical():
    grid = np.arange(0.5, 1.0, 0.025)
    P = SpaceParams(p=2, alpha=0)
    fn = "f_oscillatory:delta=1,beta=1,mu=0.5"
    coarse = critical_sigma(run_regularity_scan(fn, P, grid, 2))
    fine = critical_sigma(run_regularity_scan(fn, P, grid, 2, numerics=Numerics(quad_points=65)))
    assert coarse == pytest.approx(0.75, abs=0.05)
    assert coarse == pytest.approx(fine, abs=0.05)


def test_scan_power_log_matches_q_infinity_prediction():
    f = f_power_log(1, 0)
    P = SpaceParams(p=2, alpha=0)
    scan = run_regularity_scan(f, P, [0.5, 1.0, 1.3, 1.7, 1.9], 2)
    for pt in scan:
        pred = predict_membership(f, P.with_(s=pt.sigma, q=math.inf)).member
        assert (pt.slope > 0) == pred
