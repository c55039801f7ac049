import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from besovlab.params import (
    INF,
    LogParams,
    ParameterError,
    SpaceParams,
    compare,
    derived_indices,
    embedding_holds,
    embedding_report,
    in_Uq,
    parse_space,
    si_funct_member,
    theorem_boundaries,
    validate_space,
)


def sp(**kw):
    base = dict(n=1, p=2, q=2, s=0.5, alpha=0)
    base.update(kw)
    return SpaceParams(**base)


# -- validation ---------------------------------------------------------------

def test_validate_ok():
    validate_space(sp(s=0.75))


def test_validate_smoothness_floor():
    with pytest.raises(ParameterError, match=r"s ≤ \(α\+n\)/p − n"):
        validate_space(SpaceParams(n=1, p=1, q=1, s=0.5, alpha=1))


def test_validate_weight():
    with pytest.raises(ParameterError, match="α ≤ −n"):
        validate_space(SpaceParams(n=2, p=2, q=INF, s=1, alpha=-3))


@pytest.mark.parametrize("kw,msg", [(dict(p=0.5), "p < 1"), (dict(s=0), "s ≤ 0")])
def test_validate_other_conditions(kw, msg):
    with pytest.raises(ParameterError, match=msg):
        validate_space(sp(**kw))


def test_field_invariants():
    with pytest.raises(ParameterError):
        SpaceParams(n=0)
    with pytest.raises(ParameterError):
        SpaceParams(q=0)
    with pytest.raises(ParameterError):
        SpaceParams(p=INF)


# -- derived indices ------------------------------------------------------------

@pytest.mark.parametrize("n,p,sigma,alpha0", [(1, 0.5, 1, -1), (1, 2, 0, 0.5), (3, 1, 0, 0)])
def test_derived_indices(n, p, sigma, alpha0):
    d = derived_indices(SpaceParams(n=n, p=p, q=2, s=1, alpha=0))
    assert d.sigma_p == pytest.approx(sigma, abs=1e-15)
    assert d.alpha0 == pytest.approx(alpha0, abs=1e-15)
    assert d.lower_bound >= d.sigma_p


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 3), p=st.floats(1, 20), a=st.floats(0, 10), ds=st.floats(1e-6, 5))
def test_lower_bound_below_admissible_s(n, p, a, ds):
    s = max(0.0, (a + n) / p - n) + ds
    P = SpaceParams(n=n, p=p, q=2, s=s, alpha=a)
    validate_space(P)
    assert derived_indices(P).lower_bound < s


# -- membership rules ---------------------------------------------------------------

def test_si_examples():
    assert si_funct_member(sp(s=0.9), 0.5, 0)
    assert not si_funct_member(sp(s=1.0), 0.5, 0)
    assert si_funct_member(sp(s=1.0), 0.5, 1)


def test_si_boundary_q_inf():
    assert si_funct_member(sp(s=1.0, q=INF), 0.5, 0)


def test_si_rejects_mu_zero():
    with pytest.raises(ParameterError):
        si_funct_member(sp(), 0, 1)


def test_si_exact_rational_boundary():
    P = SpaceParams(n=1, p=3, q=2, s=Fraction(1, 3) + Fraction(1, 2), alpha=0)
    assert not si_funct_member(P, Fraction(1, 2), 0)
    assert si_funct_member(P.with_(q=INF), Fraction(1, 2), 0)


@settings(max_examples=200, deadline=None)
@given(s1=st.floats(0.05, 3), s2=st.floats(0.05, 3), mu=st.floats(0.1, 2),
       delta=st.sampled_from([0.0, 0.3, 1.0, 2.0]), q=st.sampled_from([1, 2, 3.5, INF]),
       a=st.floats(0, 1))
def test_si_monotone_in_s(s1, s2, mu, delta, q, a):
    lo, hi = sorted((s1, s2))
    if si_funct_member(sp(s=hi, q=q, alpha=a), mu, delta):
        assert si_funct_member(sp(s=lo, q=q, alpha=a), mu, delta)


def test_uq_examples():
    assert in_Uq(1, LogParams(0, 1))
    assert in_Uq(INF, LogParams(1, 0))
    assert not in_Uq(2, LogParams(0.5, 0.4))
    assert in_Uq(2, LogParams(0.5, 0.6))


@settings(max_examples=200, deadline=None)
@given(l1=st.floats(-2, 2), l2=st.floats(-2, 2), sig=st.floats(-1, 2), q=st.sampled_from([1, 1.5, 2, 4, INF]))
def test_uq_monotone_in_lambda(l1, l2, sig, q):
    lo, hi = sorted((l1, l2))
    if lo < hi and in_Uq(q, LogParams(hi, sig)):
        assert in_Uq(q, LogParams(lo, sig))


# -- embeddings ------------------------------------------------------------------

def test_embedding_examples():
    assert embedding_holds(sp(s=3, p=1, alpha=1), sp(s=1.5, p=2, alpha=0))
    assert not embedding_holds(sp(s=2, p=1, alpha=1), sp(s=1, p=2, alpha=0))
    P = sp(s=1.3, p=3, alpha=0.4)
    assert embedding_holds(P, P)


def test_embedding_report_values():
    r = embedding_report(sp(s=3, p=1, alpha=1), sp(s=1.5, p=2, alpha=0))
    assert r.smoothness_gap == pytest.approx(0.0)
    assert r.p_ok and r.weight_gap == pytest.approx(1.0)


def test_embedding_mismatch():
    with pytest.raises(ParameterError):
        embedding_holds(sp(q=2), sp(q=3))


spaces = st.builds(lambda p, a, s: sp(p=p, alpha=a, s=s),
                   st.sampled_from([1, 1.5, 2, 3, 4]), st.sampled_from([-0.5, 0, 0.5, 1, 2]),
                   st.sampled_from([0.5, 1, 1.5, 2, 3, 4]))


@settings(max_examples=300, deadline=None)
@given(a=spaces, b=spaces, c=spaces)
def test_embedding_transitive(a, b, c):
    assert embedding_holds(a, a)
    if embedding_holds(a, b) and embedding_holds(b, c):
        assert embedding_holds(a, c)


# -- theorem hypotheses ----------------------------------------------------------------

def test_boundaries_result1():
    r = theorem_boundaries(sp(s=1.2), 0.5)
    assert r.result1_applies and r.result1_bound == pytest.approx(1.0) and r.result1_acting_fails


def test_boundaries_result2():
    r = theorem_boundaries(sp(s=0.3), 2)
    assert r.result2i_applies and r.mu_even_integer


def test_boundaries_result3():
    r = theorem_boundaries(sp(s=0.7, alpha=0.5), 0.5)
    assert r.result3_applies


def test_boundaries_note_on_undefined_symbol():
    r = theorem_boundaries(sp(s=0.5, q=3), 1.5)
    assert any("q" in n for n in r.notes)


# -- parsing and comparisons -------------------------------------------------------------

def test_parse_space():
    P = parse_space("n=1,p=2,q=inf,alpha=1/2,s=0.7")
    assert math.isinf(P.q) and P.alpha == Fraction(1, 2) and P.s == 0.7
    with pytest.raises(ParameterError):
        parse_space("p=2,r=1")


def test_compare_modes():
    assert compare(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)) == 0
    assert compare(0.1 + 0.2, 0.3) == 0
    assert compare(1, 2) == -1
