"""
Evaluators for the generating-function identities, both sides.

Every evaluator works under an :class:`EvalPlan`: some variables are
*graded* (kept formal, truncated at a cap) and the rest are *specialized*
to exact rationals.  ``ubar`` and ``xbar`` stand for ``1/u`` and ``1/x``.
The left sides come from exhaustive enumeration; the right sides are
truncated with :func:`~eulerstirling.series.bounded_sum`, which asserts the
valuation of every summed term.

Grading plans (which variable makes each infinite sum converge):

=============  =========================  ====================
formula        graded                     specialized
=============  =========================  ====================
gg1            t, x, u (or ubar)          -
cor1_mid       t, ubar (x optional)       x
thm1           t (Laurent), u             x, v, q
adr1           t, u (x optional)          x, v
adr2           t, ubar                    x, v
thm4           t (Laurent), ubar          x, v, z
asczeromax     t, u                       q, z
h1tilde        t                          x, u, v, q, a
h1             t, x, u                    v, q
h2             t, xbar, ubar              v
tf43           r (Laurent)                a (as a/r), b, c, d, e
=============  =========================  ====================
"""

from __future__ import annotations

import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Sequence

from .equidist import CheckReport, joint_distribution
from .errors import DomainError, PoleError
from .series import (RationalPoint, SeriesContext, TruncatedSeries, bounded_sum,
                     expand_at_infinity, format_fraction, hypergeometric_terms,
                     qpochhammer_multi, sample_point)

__all__ = [
    "EvalPlan", "FormulaSpec", "FORMULAS", "BV_MAP",
    "lhs_series", "rhs_gg1", "rhs_cor1_mid", "rhs_thm1", "rhs_adr", "rhs_thm4",
    "rhs_asczeromax", "h_series", "tf43_sides", "verify_formula", "compare",
]

# permutation statistic -> inversion-sequence statistic with the same joint law
BV_MAP = {"des": "asc", "ides": "dist", "lmin": "max", "lmax": "zero", "rmax": "rmin"}

G_STATS = {"u": "des", "x": "ides", "q": "lmin", "v": "rmax", "z": "lmax"}


@dataclass(frozen=True)
class EvalPlan:
    """Graded variables with caps, plus an exact value for every other variable.

    ``margin`` extra degrees are carried in the Laurent variable during
    evaluation to absorb precision lost in Laurent divisions; comparisons
    happen at ``caps``.
    """
    formula: str
    caps: Mapping[str, int]
    point: RationalPoint = field(default_factory=RationalPoint)
    seed: int | None = None
    laurent: str | None = None
    margin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "caps", dict(self.caps))
        if not isinstance(self.point, RationalPoint):
            object.__setattr__(self, "point", RationalPoint(self.point))
        for name, cap in self.caps.items():
            if cap < 0:
                raise DomainError(f"cap for {name} must be non-negative")
        both = set(self.caps) & set(self.point.values)
        if both:
            raise DomainError(f"variables both graded and specialized: {sorted(both)}")

    def context(self) -> SeriesContext:
        caps = dict(self.caps)
        if self.laurent is not None:
            caps[self.laurent] += self.margin
        return SeriesContext.of(caps, laurent=self.laurent)

    def graded(self, name: str) -> bool:
        return name in self.caps

    def var(self, name: str, ctx: SeriesContext | None = None) -> TruncatedSeries:
        ctx = ctx or self.context()
        if name in self.caps:
            return ctx.gen(name)
        if name in self.point:
            return ctx.const(self.point[name])
        raise DomainError(f"plan for {self.formula} has no value for {name!r}")

    def to_json(self) -> dict:
        out = {"caps": dict(sorted(self.caps.items())), "points": [self.point.to_json()]}
        if self.laurent:
            out["laurent"] = self.laurent
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _mark_cap(s: TruncatedSeries, name: str, n: int) -> TruncatedSeries:
    """Record that ``s`` is only known below ``name**(n+1)``."""
    i = s.ctx.index(name)
    prec = list(s.prec)
    prec[i] = min(prec[i], n + 1)
    return TruncatedSeries(s.ctx, s.terms, prec, s.val)


def _products(factor: Callable[[int], TruncatedSeries], ctx: SeriesContext, start: int = 1):
    """Memoized running products ``prod_{i=start}^{m} factor(i)`` indexed by ``m``."""
    cache = {start - 1: ctx.one()}

    def get(m: int) -> TruncatedSeries:
        last = max(k for k in cache if k <= m)
        for i in range(last + 1, m + 1):
            cache[i] = cache[i - 1] * factor(i)
        return cache[m]
    return get


# --- left sides ---------------------------------------------------------------

def lhs_series(plan: EvalPlan, stats: Mapping[str, str] | None = None,
               n_max: int | None = None, source: str = "perm",
               family: str | None = None) -> TruncatedSeries:
    """Left side by enumeration: ``sum_n t^n sum w(pi) / ((1-u)^e (1-x)^e)``.

    ``stats`` maps each weight variable to a permutation statistic
    (variables not listed weigh 1).  ``family`` selects the normalization:
    ``"G"`` (``e = n``, n >= 1), ``"gg1"`` (``e = n + 1``, n >= 0) or
    ``"T5"`` (``(1-u)^n`` only).  With ``source="invseq"`` the statistics
    are read on inversion sequences through :data:`BV_MAP`.
    """
    spec = FORMULAS.get(plan.formula)
    stats = dict(stats if stats is not None else spec.lhs_stats)
    family = family or spec.family
    ctx = plan.context()
    tcap = plan.caps["t"]
    n_max = tcap if n_max is None else n_max
    if n_max < tcap:
        raise DomainError(f"n_max={n_max} is below the t-cap {tcap}")
    if source not in ("perm", "invseq"):
        raise DomainError(f"unknown source {source!r}")

    recip = plan.graded("ubar")
    weight_vars = list(stats)
    stat_names = [stats[v] if source == "perm" else BV_MAP[stats[v]] for v in weight_vars]
    graded = [(k, ctx.index(v)) for k, v in enumerate(weight_vars)
              if v in plan.caps]
    scalars = [(k, plan.point[v]) for k, v in enumerate(weight_vars)
               if v not in plan.caps and v != "u"]
    ku = weight_vars.index("u") if "u" in weight_vars else None
    u_scalar = None if (plan.graded("u") or recip or ku is None) else plan.point["u"]

    x_val = plan.var("x", ctx) if family != "T5" and ("x" in plan.caps or "x" in plan.point) else None
    u_val = None
    if plan.graded("u"):
        u_val = ctx.gen("u")
    elif "u" in plan.point:
        u_val = ctx.const(plan.point["u"])

    total = ctx.zero()
    start = 0 if family == "gg1" else 1
    for n in range(start, n_max + 1):
        e = n + 1 if family == "gg1" else n
        if n == 0:
            counts = {(0,) * len(weight_vars): 1}
        else:
            domain = "perm" if source == "perm" else "invseq"
            counts = joint_distribution(stat_names, n, domain).counts
        by_u: dict = defaultdict(lambda: defaultdict(Fraction))
        for key, c in counts.items():
            coeff = Fraction(c)
            for k, value in scalars:
                coeff *= value ** key[k]
            if u_scalar is not None:
                coeff *= u_scalar ** key[ku]
            expo = [0] * ctx.nvars
            for k, i in graded:
                expo[i] = key[k]
            if plan.graded("u"):
                expo[ctx.index("u")] = 0
            ukey = key[ku] if (ku is not None and (recip or plan.graded("u"))) else 0
            by_u[ukey][tuple(expo)] += coeff
        if recip:
            top = max(by_u) if by_u else 0
            num = [ctx.from_terms(by_u[k]) if k in by_u else ctx.zero() for k in range(top + 1)]
            den = [(-1) ** i * comb(e, i) for i in range(e + 1)]
            coeff_n = expand_at_infinity(num, den, ctx, "ubar")
        else:
            coeff_n = ctx.zero()
            for k, terms in by_u.items():
                part = ctx.from_terms(terms)
                if plan.graded("u") and k:
                    part = part.shift({"u": k})
                coeff_n = coeff_n + part
            if u_val is not None:
                coeff_n = coeff_n * (1 - u_val).invert() ** e
        if x_val is not None:
            coeff_n = coeff_n * (1 - x_val).invert() ** e
        total = total + coeff_n.shift({"t": n})
    return _mark_cap(total, "t", n_max)


# --- right sides --------------------------------------------------------------

def rhs_gg1(plan: EvalPlan) -> TruncatedSeries:
    """Double sum ``sum_{n,k} x^(n-1) u^(k-1) (1-t)^(-kn)``.

    Under a ``ubar`` plan the inner k-sum is summed in closed form and
    re-expanded at ``u = infinity``: ``-ubar / (1 - ubar r^n)``.
    """
    ctx = plan.context()
    t, x = ctx.gen("t"), ctx.gen("x")
    r = 1 - t
    if plan.graded("u"):
        u = ctx.gen("u")
        rinv = r.invert()

        def outer(n):
            big = rinv ** n
            inner = bounded_sum(lambda k: u ** (k - 1) * big ** k, "u", lambda k: k - 1, ctx)
            return x ** (n - 1) * inner
    else:
        ubar = ctx.gen("ubar")

        def outer(n):
            return x ** (n - 1) * (-ubar) * (1 - ubar * r ** n).invert()
    return bounded_sum(outer, "x", lambda n: n - 1, ctx)


def rhs_cor1_mid(plan: EvalPlan) -> TruncatedSeries:
    """Middle expression of the (des, ides) chain, expanded in ``ubar``.

    ``1/(u-1) = ubar/(1-ubar)``, so term n carries ``ubar^(n+1)``.
    """
    ctx = plan.context()
    t, ubar = ctx.gen("t"), ctx.gen("ubar")
    x = plan.var("x", ctx)
    r = 1 - t
    lead = ubar * (1 - ubar).invert()

    def term(n):
        den = (1 - x * r ** (n - 1)) * (1 - x * r ** n)
        return t * r ** (n - 1) * ubar ** n * lead * den.invert()
    tail = lead * (x - 1).invert()
    return bounded_sum(term, "ubar", lambda n: n + 1, ctx) + tail


def rhs_thm1(plan: EvalPlan) -> TruncatedSeries:
    """``G(t; x, u, v, q, 1)`` in the (t, u) grading; t is Laurent."""
    ctx = plan.context()
    t, u = ctx.gen("t"), ctx.gen("u")
    x, v, q = (plan.var(n, ctx) for n in ("x", "v", "q"))
    r = 1 - t

    def factor(i):
        num = u * (x - r ** i - x * v * t) * ((1 - q * t) * r ** (i - 1) - 1)
        return num * ((r ** i - 1) * (x - r ** i)).invert()
    prod = _products(factor, ctx)

    def num_term(n):
        return (q * x - 1 + (1 - q) * r ** (n - 1)) * (x - r ** n).invert() * prod(n - 1)

    def den_term(n):
        return ((x - 1 - x * v) * r ** (n - 1) + x * v) * (r ** n - 1).invert() * prod(n - 1)

    s1 = bounded_sum(num_term, "u", lambda n: n - 1, ctx)
    s2 = bounded_sum(den_term, "u", lambda n: n - 1, ctx)
    den = 1 - u * t * (q - 1) * (x - 1).invert() * s2
    if den.constant_term() == 0:
        raise PoleError("correction denominator vanishes at the origin")
    return v * t * (1 - x).invert() * s1 * den.invert()


def _adr1(ctx, t, x, u, v) -> TruncatedSeries:
    r = 1 - t
    prod = _products(lambda i: (x - r ** i - x * v * t) * (x - r ** i).invert(), ctx)

    def term(n):
        return v * t * u ** (n - 1) * (r ** n - x).invert() * prod(n - 1)
    return bounded_sum(term, "u", lambda n: n - 1, ctx)


def _adr2(ctx, t, x, ubar, v) -> TruncatedSeries:
    r = 1 - t
    prod = _products(lambda i: (1 - x * r ** (i - 1))
                     * (x * r ** (i - 1) * (v * t - 1) + 1).invert(), ctx)

    def term(n):
        return v * t * r ** (n - 1) * ubar ** n * (x * r ** (n - 1) - 1).invert() * prod(n)
    return bounded_sum(term, "ubar", lambda n: n, ctx)


def rhs_adr(plan: EvalPlan, form: str | None = None,
            x: TruncatedSeries | None = None) -> TruncatedSeries:
    """``G(t; x, u, v, 1, 1)`` as the u-series ``adr1`` or the ubar-series ``adr2``.

    ``x`` may be overridden by a series (needed by :func:`rhs_thm4`).
    """
    form = form or plan.formula
    ctx = plan.context()
    t, v = ctx.gen("t"), plan.var("v", ctx)
    x = plan.var("x", ctx) if x is None else x
    if form == "adr1":
        return _adr1(ctx, t, x, ctx.gen("u"), v)
    if form == "adr2":
        return _adr2(ctx, t, x, ctx.gen("ubar"), v)
    raise DomainError(f"unknown form {form!r}")


def rhs_thm4(plan: EvalPlan) -> TruncatedSeries:
    """``G(t; x, u, v, 1, z)`` in the (t, ubar) grading; t is Laurent.

    ``T_n = r^(n-1) G(t; x r^(n-1), u, v, 1, 1)`` re-enters the ``adr2``
    evaluator with a series as its x argument.
    """
    ctx = plan.context()
    t, ubar = ctx.gen("t"), ctx.gen("ubar")
    x, v, z = (plan.var(n, ctx) for n in ("x", "v", "z"))
    r = 1 - t
    prod = _products(lambda i: ubar * (t * (1 - z) * r ** (i - 1) + r ** i - 1)
                     * (r ** i - 1).invert(), ctx)

    def num_term(n):
        rn = r ** (n - 1)
        tn = rn * _adr2(ctx, t, x * rn, ubar, v)
        return z * t * v * rn * (ubar + x * tn) * (x * rn - 1).invert() * prod(n - 1)

    def den_term(n):
        return t * (z - 1) * r ** (n - 1) * ubar * (r ** n - 1).invert() * prod(n - 1)

    s1 = bounded_sum(num_term, "ubar", lambda n: n, ctx)
    s2 = bounded_sum(den_term, "ubar", lambda n: n, ctx)
    return s1 * (1 - s2).invert()


def rhs_asczeromax(plan: EvalPlan) -> TruncatedSeries:
    """``sum_{n>=0} q z t u^n / (1-(n-q+1)t) prod_{i=0}^{n} (1-(i-q+1)t)/(1-(i+z)t)``."""
    ctx = plan.context()
    t, u = ctx.gen("t"), ctx.gen("u")
    q, z = plan.var("q", ctx), plan.var("z", ctx)
    prod = _products(lambda i: (1 - (i - q + 1) * t) * (1 - (i + z) * t).invert(), ctx, start=0)

    def term(n):
        return q * z * t * u ** n * (1 - (n - q + 1) * t).invert() * prod(n)
    return bounded_sum(term, "u", lambda n: n, ctx, start=0)


# --- symmetric series -----------------------------------------------------------

def _sum_terms(terms, grading, ctx, bound=lambda k: k):
    """Sum a term generator under ``bounded_sum`` (index k counts from 0)."""
    seen: list = []

    def term(k):
        while len(seen) <= k:
            seen.append(next(terms))
        return seen[k]
    return bounded_sum(term, grading, bound, ctx, start=0)


def _h1tilde(ctx, t, x, u, v, q, a):
    r = 1 - t
    b = (1 - q * t) * (1 - q * v) * (x * (1 - v * t) * (1 - v)).invert()
    c = (1 - v * t) * (1 - q * v) * (x * (1 - q * t) * (1 - q)).invert()
    d = (1 - q * v) ** 2 * (u * x * (1 - v) * (1 - q)).invert()
    e = r ** 2 * x.invert()
    at = 1 - a * t
    terms = hypergeometric_terms([r, b, c, at], [d, e, at * u], r, r)
    series = _sum_terms(terms, "t", ctx)
    pre = q * v * t * (1 - t - x + x * a * t) * (r * (1 - t - x)).invert()
    return pre * series


def _h1(ctx, t, x, u, v, q):
    """``H_1`` with x, u graded: each k-step carries one factor of u."""
    r = 1 - t
    beta = (1 - q * t) * (1 - q * v) * ((1 - v * t) * (1 - v)).invert()
    gamma = (1 - v * t) * (1 - q * v) * ((1 - q * t) * (1 - q)).invert()
    delta = (1 - q * v) ** 2 * ((1 - v) * (1 - q)).invert()
    if delta.constant_term() == 0:
        raise PoleError("q*v = 1 is a pole of H_1 in this grading")
    prod = _products(lambda i: r * u * (x - beta * r ** (i - 1)) * (x - gamma * r ** (i - 1))
                     * ((u * x - delta * r ** (i - 1)) * (x - r ** (i + 1))).invert(), ctx)
    series = bounded_sum(lambda k: prod(k), ("x", "u"), lambda k: k, ctx, start=0)
    return q * v * t * (1 - t - x).invert() * series


def _h2(ctx, t, xbar, ubar, v):
    """``H_2(t; x, u, 1, v)`` written in ``xbar = 1/x`` and ``ubar = 1/u``."""
    r = 1 - t
    w = 1 - v * t
    prod = _products(lambda i: r * ubar * (xbar - r ** (i - 1))
                     * (xbar - w * r ** i).invert(), ctx)
    grading = [n for n in ("xbar", "ubar") if n in ctx.variables]
    series = bounded_sum(lambda k: prod(k), grading, lambda k: k, ctx, start=0)
    return w * (w - xbar).invert() * series


H_ARGS = {
    "h1tilde": ("x", "u", "v", "q", "a"),
    "h1": ("x", "u", "v", "q"),
    "h2": ("xbar", "ubar", "v"),
}


def h_series(plan: EvalPlan, which: str | None = None,
             swap: Sequence[tuple[str, str]] = ()) -> TruncatedSeries:
    """Evaluate ``which`` with the argument pairs in ``swap`` interchanged."""
    which = which or plan.formula
    if which not in H_ARGS:
        raise DomainError(f"unknown symmetric series {which!r}")
    ctx = plan.context()
    args = {n: plan.var(n, ctx) for n in H_ARGS[which]}
    for a, b in swap:
        args[a], args[b] = args[b], args[a]
    t = ctx.gen("t")
    fn = {"h1tilde": _h1tilde, "h1": _h1, "h2": _h2}[which]
    return fn(ctx, t, *(args[n] for n in H_ARGS[which]))


def tf43_sides(plan: EvalPlan, j: int, kmax: int | None = None):
    """Both sides of the 4phi3 transformation in the r grading.

    The point supplies ``a`` as the coefficient of ``r``: the upper
    parameter ``1 - a`` is evaluated at ``a = point['a'] * r`` so that each
    term gains a factor of ``r`` and the series converges r-adically.
    With ``kmax`` the partial sums through ``k = kmax`` are returned instead.
    """
    if j < 0:
        raise DomainError("j must be non-negative")
    ctx = plan.context()
    rr = ctx.gen("r")
    a = plan.var("a", ctx) * rr
    b, c, d, e = (plan.var(n, ctx) for n in ("b", "c", "d", "e"))
    q = 1 - rr
    qj = q ** j
    bc_de = b * c * (d * e).invert()
    lhs_terms = hypergeometric_terms([qj, 1 - a, b, c], [d, e, q * qj * (1 - a) * bc_de], q, q)
    rhs_terms = hypergeometric_terms([qj, 1 - a, d * b.invert(), d * c.invert()],
                                     [d, d * e * (b * c).invert(), q * qj * (1 - a) * e.invert()],
                                     q, q)
    pre = (qpochhammer_multi([q * e.invert(), q * (1 - a) * bc_de], q, j)
           * qpochhammer_multi([q * (1 - a) * e.invert(), q * bc_de], q, j).invert())
    if kmax is not None:
        lhs = sum((next(lhs_terms) for _ in range(kmax + 1)), ctx.zero())
        rhs = sum((next(rhs_terms) for _ in range(kmax + 1)), ctx.zero())
    else:
        lhs = _sum_terms(lhs_terms, "r", ctx)
        rhs = _sum_terms(rhs_terms, "r", ctx)
    return lhs, pre * rhs


# --- registry -----------------------------------------------------------------

def _ne(*pairs):
    return lambda p: all(p[name] not in bad for name, bad in pairs)


def _h1tilde_ok(p):
    x, u, v, q = p["x"], p["u"], p["v"], p["q"]
    if 0 in (x, u) or 1 in (x, u, v, q):
        return False
    return (1 - q * v) ** 2 != u * x * (1 - v) * (1 - q)


def _tf43_ok(p):
    b, c, d, e = p["b"], p["c"], p["d"], p["e"]
    return d not in (0, 1) and e not in (0, 1) and b != 0 and c != 0 and b * c != d * e


@dataclass(frozen=True)
class FormulaSpec:
    fid: str
    caps: Mapping[str, int]
    specialized: tuple[str, ...]
    admissible: Callable[[RationalPoint], bool]
    lhs_stats: Mapping[str, str] = field(default_factory=dict)
    family: str = "G"
    laurent: str | None = None
    margin: int = 0
    description: str = ""

    def plan(self, point=None, caps=None, seed=None) -> EvalPlan:
        merged = dict(self.caps)
        for k, c in (caps or {}).items():
            if k in merged and c is not None:
                merged[k] = c
        return EvalPlan(self.fid, merged, RationalPoint(point or {}), seed,
                        self.laurent, self.margin if self.laurent else 0)


FORMULAS: dict[str, FormulaSpec] = {s.fid: s for s in [
    FormulaSpec("gg1", {"t": 8, "x": 4, "u": 4}, (), lambda p: True,
                {"u": "des", "x": "ides"}, "gg1",
                description="(des, ides) double sum"),
    FormulaSpec("cor1_mid", {"t": 8, "ubar": 6}, ("x",), _ne(("x", (1,))),
                {"u": "des", "x": "ides"}, "gg1",
                description="(des, ides) middle expression in ubar"),
    FormulaSpec("thm1", {"t": 8, "u": 7}, ("x", "v", "q"), _ne(("x", (1,))),
                {"u": "des", "x": "ides", "v": "rmax", "q": "lmin"}, "G", "t", 2,
                description="G(t;x,u,v,q,1)"),
    FormulaSpec("adr1", {"t": 8, "u": 7}, ("x", "v"), _ne(("x", (1,))),
                {"u": "des", "x": "ides", "v": "rmax"},
                description="G(t;x,u,v,1,1) as a u-series"),
    FormulaSpec("adr2", {"t": 8, "ubar": 6}, ("x", "v"), _ne(("x", (1,))),
                {"u": "des", "x": "ides", "v": "rmax"},
                description="G(t;x,u,v,1,1) as a ubar-series"),
    FormulaSpec("thm4", {"t": 7, "ubar": 6}, ("x", "v", "z"), _ne(("x", (1,))),
                {"u": "des", "x": "ides", "v": "rmax", "z": "lmax"}, "G", "t", 2,
                description="G(t;x,u,v,1,z)"),
    FormulaSpec("asczeromax", {"t": 8, "u": 6}, ("q", "z"), lambda p: True,
                {"u": "des", "z": "lmax", "q": "lmin"}, "T5",
                description="(des, lmax, lmin) with divisor (1-u)^n"),
    FormulaSpec("h1tilde", {"t": 8}, ("x", "u", "v", "q", "a"), _h1tilde_ok,
                description="4phi3 series with parameter a"),
    FormulaSpec("h1", {"t": 8, "x": 4, "u": 4}, ("v", "q"),
                lambda p: 1 not in (p["v"], p["q"]) and p["v"] * p["q"] != 1,
                description="the a = 1/t case"),
    FormulaSpec("h2", {"t": 8, "xbar": 4, "ubar": 4}, ("v",), lambda p: True,
                description="series in 1/x and 1/u"),
    FormulaSpec("tf43", {"r": 8}, ("a", "b", "c", "d", "e"), _tf43_ok,
                laurent="r", margin=2,
                description="4phi3 transformation"),
]}


# --- verification -------------------------------------------------------------

def _witness(w) -> dict:
    mono, a, b = w
    return {"monomial": {k: v for k, v in mono.items() if v},
            "lhs_coeff": format_fraction(a), "rhs_coeff": format_fraction(b)}


def compare(claim: str, plan: EvalPlan, lhs: TruncatedSeries, rhs: TruncatedSeries,
            start: float, detail: str = "", extra: Mapping | None = None) -> CheckReport:
    """Exact comparison of two series on the plan's cap box."""
    w = lhs.agree(rhs, plan.caps)
    params = plan.to_json()
    params.update(extra or {})
    elapsed = time.perf_counter() - start
    if w is None:
        return CheckReport(claim, "pass", params, None, elapsed, detail)
    return CheckReport(claim, "fail", params, _witness(w), elapsed, detail)


def _plan_without(plan: EvalPlan, names, **caps) -> EvalPlan:
    """Same plan with ``names`` removed from the point and ``caps`` graded."""
    vals = {k: v for k, v in plan.point.values.items() if k not in names}
    merged = dict(plan.caps)
    merged.update(caps)
    return EvalPlan(plan.formula, merged, RationalPoint(vals), plan.seed, plan.laurent, plan.margin)


def _checks(fid: str, plan: EvalPlan, j: int | None) -> list[CheckReport]:
    out: list[CheckReport] = []
    t0 = time.perf_counter()
    if fid == "gg1":
        out.append(compare("gg1:rhs=lhs", plan, lhs_series(plan), rhs_gg1(plan), t0))
    elif fid == "cor1_mid":
        out.append(compare("cor1_mid:rhs=lhs", plan, lhs_series(plan), rhs_cor1_mid(plan), t0))
    elif fid == "thm1":
        rhs = rhs_thm1(plan)
        out.append(compare("thm1:rhs=lhs", plan, lhs_series(plan), rhs, t0))
        t0 = time.perf_counter()
        swapped = EvalPlan(plan.formula, plan.caps, plan.point.swapped("v", "q"),
                           plan.seed, plan.laurent, plan.margin)
        out.append(compare("thm1:swap(v,q)", plan, rhs, rhs_thm1(swapped), t0))
    elif fid in ("adr1", "adr2"):
        out.append(compare(f"{fid}:rhs=lhs", plan, lhs_series(plan), rhs_adr(plan), t0))
    elif fid == "thm4":
        rhs = rhs_thm4(plan)
        out.append(compare("thm4:rhs=lhs", plan, lhs_series(plan), rhs, t0))
        t0 = time.perf_counter()
        p1 = EvalPlan(plan.formula, plan.caps, plan.point.replace(z=1), plan.seed,
                      plan.laurent, plan.margin)
        out.append(compare("thm4:z=1", p1, rhs_thm4(p1), rhs_adr(p1, "adr2"), t0))
    elif fid == "asczeromax":
        out.append(compare("asczeromax:rhs=lhs", plan, lhs_series(plan),
                           rhs_asczeromax(plan), t0))
    elif fid in ("h1tilde", "h1"):
        base = h_series(plan)
        for swap in ((("x", "u"),), (("v", "q"),), (("x", "u"), ("v", "q"))):
            t0 = time.perf_counter()
            name = "+".join(f"({a},{b})" for a, b in swap)
            out.append(compare(f"{fid}:swap{name}", plan, base,
                               h_series(plan, swap=swap), t0))
    elif fid == "h2":
        out.append(compare("h2:swap(x,u)", plan, h_series(plan),
                           h_series(plan, swap=[("xbar", "ubar")]), t0))
    elif fid == "tf43":
        for jj in ([j] if j is not None else [0, 1, 2]):
            t0 = time.perf_counter()
            lhs, rhs = tf43_sides(plan, jj)
            out.append(compare("tf43:lhs=rhs", plan, lhs, rhs, t0, extra={"j": jj}))
    else:
        raise DomainError(f"unknown formula id {fid!r}")
    return out


def _global_checks(fid: str, caps: Mapping[str, int] | None, seed, rng) -> list[CheckReport]:
    """Point-independent or fully graded companion checks."""
    out = []
    if fid == "cor1_mid":
        spec = FORMULAS[fid]
        tcap = (caps or {}).get("t") or spec.caps["t"]
        ucap = (caps or {}).get("ubar") or 4
        plan = EvalPlan(fid, {"t": tcap, "x": (caps or {}).get("x") or 3, "ubar": ucap},
                        seed=seed)
        t0 = time.perf_counter()
        mid = rhs_cor1_mid(plan)
        out.append(compare("cor1_mid:rhs=gg1", plan, mid, rhs_gg1(plan), t0,
                           "x graded"))
        t0 = time.perf_counter()
        out.append(compare("cor1_mid:rhs=lhs", plan, lhs_series(plan), mid, t0, "x graded"))
    elif fid == "adr1":
        tcap = (caps or {}).get("t") or 8
        xc = (caps or {}).get("x") or 4
        uc = min((caps or {}).get("u") or 4, 4)
        plan = EvalPlan("adr1", {"t": tcap, "x": xc, "u": uc}, RationalPoint({"v": 1}), seed)
        t0 = time.perf_counter()
        ctx = plan.context()
        x, u = ctx.gen("x"), ctx.gen("u")
        g = rhs_adr(plan)
        lhs = (1 + g) * ((1 - u) * (1 - x)).invert()
        out.append(compare("adr1:v=1=gg1", plan, lhs, rhs_gg1(plan), t0,
                           "(1 + G(t;x,u,1,1,1)) / ((1-u)(1-x)) against the double sum"))
    elif fid == "h2":
        spec = FORMULAS["adr2"]
        point = sample_point(("x", "v"), rng, lambda p: p["x"] not in (0, 1))
        tcap = (caps or {}).get("t") or 8
        ucap = (caps or {}).get("ubar") or spec.caps["ubar"]
        plan = EvalPlan("h2", {"t": tcap, "ubar": ucap},
                        RationalPoint({"xbar": 1 / point["x"], "v": point["v"]}), seed)
        t0 = time.perf_counter()
        ctx = plan.context()
        t, ubar = ctx.gen("t"), ctx.gen("ubar")
        v = plan.var("v", ctx)
        h2 = h_series(plan)
        scaled = v * t * ubar * plan.var("xbar", ctx) * (1 - v * t).invert() * h2
        adr = _adr2(ctx, t, ctx.const(point["x"]), ubar, v)
        out.append(compare("h2:adr2", plan, adr, scaled, t0,
                           "adr2 = vt ubar xbar / (1 - vt) * H2"))
    return out


def verify_formula(fid: str, caps: Mapping[str, int] | None = None, points: int = 3,
                   seed: int = 0, j: int | None = None,
                   explicit_points: Sequence[Mapping] | None = None,
                   redraws: int = 20) -> list[CheckReport]:
    """Run every check attached to ``fid`` at ``points`` sampled specializations.

    Points that hit a pole during evaluation are re-drawn up to ``redraws``
    times; exhaustion raises :class:`PoleError`.
    """
    if fid not in FORMULAS:
        raise DomainError(f"unknown formula id {fid!r}; choose from {sorted(FORMULAS)}")
    if points < 1:
        raise DomainError("points must be >= 1")
    spec = FORMULAS[fid]
    rng = random.Random(seed)
    reports: list[CheckReport] = []
    todo = list(explicit_points or [])
    n_points = 1 if not spec.specialized else (len(todo) or points)
    for idx in range(n_points):
        for attempt in range(redraws + 1):
            if idx < len(todo):
                point = RationalPoint(todo[idx])
            elif spec.specialized:
                point = sample_point(spec.specialized, rng, spec.admissible)
            else:
                point = RationalPoint({})
            plan = spec.plan(point, caps, seed)
            try:
                reports.extend(_checks(fid, plan, j))
                break
            except ZeroDivisionError:
                if idx < len(todo) or not spec.specialized or attempt == redraws:
                    raise PoleError(f"{fid}: no pole-free point after {attempt + 1} draws")
    reports.extend(_global_checks(fid, caps, seed, rng))
    return reports
