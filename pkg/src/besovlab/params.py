"""Space parameters and the arithmetic predicates attached to them.

Everything here is pure arithmetic on the indices ``(n, p, q, s, alpha)``:
admissibility, the derived indices of the ball-means characterization,
membership rules for the catalog functions, the embedding conditions and
the hypotheses of the composition results.

``q = inf`` is represented by :data:`math.inf` and every predicate branches on
it explicitly.  Boundary equalities are decided exactly when all inputs are
``int`` or :class:`fractions.Fraction`, and with an absolute tolerance of
``1e-12`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Real
from typing import Optional

__all__ = [
    "INF",
    "BOUNDARY_TOL",
    "ParameterError",
    "SpaceParams",
    "DerivedIndices",
    "LogParams",
    "BoundaryReport",
    "EmbeddingReport",
    "validate_space",
    "derived_indices",
    "si_funct_member",
    "in_Uq",
    "embedding_holds",
    "embedding_report",
    "theorem_boundaries",
    "is_even_integer",
    "compare",
]

INF = math.inf
BOUNDARY_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when parameters violate a standing assumption."""


def _is_exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def compare(a, b, *exact_inputs) -> int:
    """Three-way comparison used for knife-edge boundaries.

    Parameters
    ----------
    a, b : real
        Values to compare.
    *exact_inputs
        The raw inputs ``a`` and ``b`` were computed from.  When every one
        of them (and ``a``, ``b``) is an ``int`` or ``Fraction`` the
        comparison is exact; otherwise values within ``BOUNDARY_TOL`` are
        considered equal.

    Returns
    -------
    int
        ``-1``, ``0`` or ``1``.
    """
    if _is_exact(a, b, *exact_inputs):
        return (a > b) - (a < b)
    if math.isinf(a) or math.isinf(b):
        return (a > b) - (a < b)
    d = float(a) - float(b)
    if abs(d) <= BOUNDARY_TOL:
        return 0
    return 1 if d > 0 else -1


def is_even_integer(x) -> bool:
    """True if ``x`` is an even integer (within the boundary tolerance)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x).denominator == 1 and int(x) % 2 == 0
    r = round(float(x))
    return abs(float(x) - r) <= BOUNDARY_TOL and r % 2 == 0


@dataclass(frozen=True)
class SpaceParams:
    """Indices of the weighted Besov space ``B^s_{p,q}(R^n, |x|^alpha)``.

    Attributes
    ----------
    n : int
        Dimension.
    p : real
        Integrability, ``0 < p < inf``.
    q : real or inf
        Summability, ``0 < q <= inf``.
    s : real
        Smoothness.
    alpha : real
        Weight exponent, ``alpha > -n``.
    """

    n: int = 1
    p: Real = 2
    q: Real = 2
    s: Real = 0.5
    alpha: Real = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ParameterError("n < 1: the dimension must be a positive integer")
        if not self.p > 0 or math.isinf(self.p):
            raise ParameterError("p <= 0: integrability must lie in (0, inf)")
        if not self.q > 0:
            raise ParameterError("q <= 0: summability must be positive or inf")
        if not math.isfinite(self.s):
            raise ParameterError("s must be finite")
        if not self.alpha > -self.n:
            raise ParameterError("α ≤ −n: the weight |x|^alpha is not locally integrable")

    @property
    def critical(self):
        """The index ``(n + alpha)/p``."""
        return (self.n + self.alpha) / self.p

    def with_(self, **changes) -> "SpaceParams":
        """Return a copy with some fields replaced."""
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": float(self.p),
            "q": "inf" if math.isinf(self.q) else float(self.q),
            "s": float(self.s),
            "alpha": float(self.alpha),
        }


@dataclass(frozen=True)
class DerivedIndices:
    """``sigma_p``, ``alpha0`` and the lower bound of admissible ``s``."""

    sigma_p: Real
    alpha0: Real
    lower_bound: Real


@dataclass(frozen=True)
class LogParams:
    """Exponents ``(lambda, sigma)`` of the iterated-logarithm function."""

    lam: Real
    sigma: Real

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.sigma)):
            raise ParameterError("lambda and sigma must be finite")


def validate_space(params: SpaceParams) -> None:
    """Check the standing assumptions of the composition results.

    The conditions are ``1 <= p < inf``, ``alpha > -n`` and
    ``s > max(0, (alpha + n)/p - n)``.

    Raises
    ------
    ParameterError
        Naming the first violated inequality.
    """
    n, p, s, a = params.n, params.p, params.s, params.alpha
    if p < 1:
        raise ParameterError("p < 1")
    if math.isinf(p):
        raise ParameterError("p = ∞")
    if not a > -n:
        raise ParameterError("α ≤ −n")
    bound = (a + n) / p - n
    if compare(s, bound, n, p, a) <= 0:
        raise ParameterError("s ≤ (α+n)/p − n")
    if compare(s, 0, s) <= 0:
        raise ParameterError("s ≤ 0")


def derived_indices(params: SpaceParams) -> DerivedIndices:
    """Return ``sigma_p = max(0, n/p - n)``, ``alpha0 = n - n/p`` and
    ``max(sigma_p, alpha/p - alpha0)``."""
    n, p, a = params.n, params.p, params.alpha
    sigma_p = max(0, n / p - n)
    alpha0 = n - n / p
    return DerivedIndices(sigma_p, alpha0, max(sigma_p, a / p - alpha0))


def si_funct_member(params: SpaceParams, mu, delta) -> bool:
    """Membership of ``theta(x)|x|^mu (-log|x|)^(-delta)`` in the space.

    With ``B = (n + alpha)/p + mu`` the function belongs to
    ``B^s_{p,q}(|x|^alpha)`` iff ``s < B``, or ``s = B`` and
    ``q*delta > 1`` (when ``delta > 0``), or ``s = B`` and ``q = inf``
    (when ``delta = 0``).

    The rule is applied literally.  For ``delta = 0`` and ``mu`` an even
    integer the function is smooth, which the rule does not single out;
    callers that need the true answer should special-case it (see
    :func:`besovlab.diagnostics.predict_membership`).

    Raises
    ------
    ParameterError
        If ``mu = 0`` or ``delta < 0``.
    """
    if mu == 0:
        raise ParameterError("μ = 0 is excluded (μ² + δ² > 0 with μ ≠ 0)")
    if delta < 0:
        raise ParameterError("δ < 0")
    n, p, q, s, a = params.n, params.p, params.q, params.s, params.alpha
    boundary = (n + a) / p + mu
    c = compare(s, boundary, n, p, a, s, mu)
    if c < 0:
        return True
    if c > 0:
        return False
    if delta > 0:
        if math.isinf(q):
            return True
        return compare(q * delta, 1, q, delta) > 0
    return math.isinf(q)


def in_Uq(q, lp: LogParams) -> bool:
    """Membership of ``(lambda, sigma)`` in the set ``U_q``.

    * ``1 < q < inf``: ``lambda = 1 - 1/q`` and ``sigma > 1/q``, or
      ``lambda < 1 - 1/q``;
    * ``q = 1``: ``lambda = 0`` and ``sigma > 0``, or ``lambda < 0``;
    * ``q = inf``: ``lambda = 1`` and ``sigma >= 0``, or ``lambda < 1``.
    """
    if not q >= 1:
        raise ParameterError("q < 1")
    lam, sig = lp.lam, lp.sigma
    if math.isinf(q):
        c = compare(lam, 1, lam)
        return c < 0 or (c == 0 and compare(sig, 0, sig) >= 0)
    if compare(q, 1, q) == 0:
        c = compare(lam, 0, lam)
        return c < 0 or (c == 0 and compare(sig, 0, sig) > 0)
    edge = 1 - Fraction(1) / q if isinstance(q, (int, Fraction)) else 1 - 1 / q
    c = compare(lam, edge, lam, q)
    if c < 0:
        return True
    if c > 0:
        return False
    inv = Fraction(1) / q if isinstance(q, (int, Fraction)) else 1 / q
    return compare(sig, inv, sig, q) > 0


@dataclass(frozen=True)
class EmbeddingReport:
    """The three embedding inequalities and their values."""

    holds: bool
    smoothness_gap: Real  # (s2 - (n+a2)/p2) - (s1 - (n+a1)/p1), must be >= 0
    p_ok: bool
    weight_gap: Real  # a2/p2 - a1/p1, must be >= 0


def embedding_report(source: SpaceParams, target: SpaceParams) -> EmbeddingReport:
    """Evaluate the embedding conditions for ``source -> target``.

    The source plays ``(s2, p2, alpha2)`` and the target ``(s1, p1, alpha1)``:
    ``s1 - (n+alpha1)/p1 <= s2 - (n+alpha2)/p2``, ``p2 <= p1`` and
    ``alpha2/p2 >= alpha1/p1``.
    """
    if source.n != target.n:
        raise ParameterError("source and target dimensions differ")
    if source.q != target.q:
        raise ParameterError("source and target must share q")
    n = source.n
    s2, p2, a2 = source.s, source.p, source.alpha
    s1, p1, a1 = target.s, target.p, target.alpha
    raw = (n, s1, p1, a1, s2, p2, a2)
    gap = (s2 - (n + a2) / p2) - (s1 - (n + a1) / p1)
    wgap = a2 / p2 - a1 / p1
    c1 = compare(gap, 0, *raw) >= 0
    c2 = compare(p2, p1, p1, p2) <= 0
    c3 = compare(wgap, 0, *raw) >= 0
    return EmbeddingReport(c1 and c2 and c3, gap, c2, wgap)


def embedding_holds(source: SpaceParams, target: SpaceParams) -> bool:
    """True iff the sufficient embedding conditions hold for ``source -> target``."""
    return embedding_report(source, target).holds


@dataclass(frozen=True)
class BoundaryReport:
    """Which composition results apply to ``(params, mu)`` and what they say.

    Attributes
    ----------
    standing_assumptions : bool
        ``1 <= p < inf``, ``alpha > -n`` and ``s > max(0, (alpha+n)/p - n)``.
    mu_even_integer : bool
    result1_applies : bool
        ``n = 1``, ``1 <= p, q < inf`` and ``mu`` not an even integer.
    result1_bound : real
        ``mu + (1 + alpha)/p``.
    result1_acting_fails : bool
        ``result1_applies`` and ``s >= result1_bound``: the map
        ``f -> |f|^mu`` cannot act on the space.
    critical : real
        ``(n + alpha)/p``.
    result2i_applies : bool
        ``alpha >= 0``, ``mu > 1`` and (``s < critical`` or
        ``s = critical`` with ``q > 1``); boundedness of ``f`` is needed.
    result2ii_applies : bool
        ``mu < 1`` and ``s > critical``; unboundedness of ``f`` is needed.
    result3_applies : bool
        ``n = 1``, ``mu < 1``, ``alpha/(p mu) <= s <= (1+alpha)/p`` and
        ``0 < alpha < p - 1``; unboundedness of ``f`` is needed.
    result3_lower : real
        ``alpha/(p mu)``.
    """

    standing_assumptions: bool
    mu_even_integer: bool
    result1_applies: bool
    result1_bound: Real
    result1_acting_fails: bool
    critical: Real
    result2i_applies: bool
    result2ii_applies: bool
    result3_applies: bool
    result3_lower: Real
    notes: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, Fraction):
                v = float(v)
            out[k] = list(v) if isinstance(v, tuple) else v
        return out


def theorem_boundaries(params: SpaceParams, mu) -> BoundaryReport:
    """Evaluate the hypotheses and predictions of the composition results.

    Notes
    -----
    The argument for the critical case ``s = (n+alpha)/p`` of the bounded
    part requires ``mu (1 - 1/q) > 1 - 1/beta`` where ``beta`` is not
    defined; it is read as ``q``.  The condition is reported in ``notes``
    and does not gate ``result2i_applies``.
    """
    if not mu > 0:
        raise ParameterError("μ ≤ 0")
    n, p, q, s, a = params.n, params.p, params.q, params.s, params.alpha
    raw = (n, p, s, a, mu)
    try:
        validate_space(params)
        standing = True
    except ParameterError:
        standing = False
    even = is_even_integer(mu)
    r1_applies = n == 1 and p >= 1 and not math.isinf(q) and q >= 1 and not even
    bound1 = mu + (1 + a) / p
    r1_fails = r1_applies and compare(s, bound1, *raw) >= 0
    crit = (n + a) / p
    c_crit = compare(s, crit, *raw)
    r2i = compare(a, 0, a) >= 0 and mu > 1 and (c_crit < 0 or (c_crit == 0 and q > 1))
    r2ii = mu < 1 and c_crit > 0
    lower3 = a / (p * mu)
    r3 = (
        n == 1
        and mu < 1
        and compare(s, lower3, *raw) >= 0
        and compare(s, (1 + a) / p, *raw) <= 0
        and compare(a, 0, a) > 0
        and compare(a, p - 1, a, p) < 0
    )
    notes = []
    if r2i and c_crit == 0 and not math.isinf(q):
        lhs = mu * (1 - 1 / q)
        notes.append(f"critical case: mu(1-1/q) = {float(lhs):.6g} vs 1-1/q = {float(1 - 1 / q):.6g}")
    return BoundaryReport(
        standing_assumptions=standing,
        mu_even_integer=even,
        result1_applies=bool(r1_applies),
        result1_bound=bound1,
        result1_acting_fails=bool(r1_fails),
        critical=crit,
        result2i_applies=bool(r2i),
        result2ii_applies=bool(r2ii),
        result3_applies=bool(r3),
        result3_lower=lower3,
        notes=tuple(notes),
    )


def parse_real(text: str):
    """Parse a number, keeping integers and ``a/b`` literals exact."""
    t = text.strip()
    if t.lower() in ("inf", "+inf", "infinity", "∞"):
        return INF
    if "/" in t:
        return Fraction(t)
    try:
        return int(t)
    except ValueError:
        return float(t)


def parse_space(text: str, base: Optional[SpaceParams] = None) -> SpaceParams:
    """Parse ``"n=1,p=2,q=inf,alpha=0,s=0.7"`` into :class:`SpaceParams`."""
    values = {} if base is None else dict(base.__dict__)
    for part in filter(None, (x.strip() for x in text.split(","))):
        if "=" not in part:
            raise ParameterError(f"malformed space entry {part!r}")
        key, val = (x.strip() for x in part.split("=", 1))
        if key == "a":
            key = "alpha"
        if key not in ("n", "p", "q", "s", "alpha"):
            raise ParameterError(f"unknown space parameter {key!r}")
        v = parse_real(val)
        if key == "n":
            if not isinstance(v, int):
                raise ParameterError("n must be an integer")
        values[key] = v
    return SpaceParams(**values)
