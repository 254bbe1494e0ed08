"""
Exact truncated multivariate formal series over the rationals.

A :class:`SeriesContext` fixes the variables, a degree cap per variable and
an optional Laurent variable that may carry a bounded negative exponent.  A
:class:`TruncatedSeries` stores the coefficients of the monomials inside the
cap box together with a per-variable *precision*: coefficient ``e`` is known
exactly iff ``e[y] < prec[y]`` for every variable ``y``.  Exact polynomials
have infinite precision.  Products and inverses propagate precision from the
operands' valuations, so truncation error can never leak into the box
unnoticed; :meth:`TruncatedSeries.agree` refuses to compare inexact
coefficients.

>>> ctx = SeriesContext(("t",), (3,))
>>> t = ctx.gen("t")
>>> (1 - t).invert()
TruncatedSeries(t: 1 + t + t^2 + t^3)
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import (ContextMismatchError, DomainError, PoleError,
                     PrecisionError, ValuationError)

__all__ = [
    "SeriesContext", "TruncatedSeries", "RationalPoint", "Scalar",
    "ts_arith", "ts_invert", "ts_specialize", "expand_at_infinity",
    "qpochhammer", "qpochhammer_multi", "hypergeometric_terms",
    "basic_hypergeometric", "bounded_sum", "as_fraction", "format_fraction",
    "DEFAULT_POOL", "sample_point",
]

INF = math.inf
Scalar = Union[int, Fraction]
Exps = tuple


def as_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string exactly; floats are rejected."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use 'p/q'")
    return Fraction(value)


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class SeriesContext:
    variables: tuple[str, ...]
    caps: tuple[int, ...]
    laurent_variable: str | None = None
    min_valuation: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "caps", tuple(int(c) for c in self.caps))
        if len(self.variables) != len(self.caps):
            raise DomainError("one cap per variable is required")
        if len(set(self.variables)) != len(self.variables):
            raise DomainError(f"duplicate variable names in {self.variables}")
        if any(c < 0 for c in self.caps):
            raise DomainError("caps must be non-negative")
        if self.min_valuation > 0:
            raise DomainError("min_valuation must be <= 0")
        if self.laurent_variable is not None and self.laurent_variable not in self.variables:
            raise DomainError(f"Laurent variable {self.laurent_variable!r} is not a context variable")
        if self.laurent_variable is None and self.min_valuation != 0:
            raise DomainError("min_valuation requires a Laurent variable")

    @classmethod
    def of(cls, caps: Mapping[str, int], laurent: str | None = None,
           budget: int | None = None) -> "SeriesContext":
        """Build a context from ``{name: cap}``; ``budget`` defaults to the Laurent cap."""
        names = tuple(caps)
        min_val = 0
        if laurent is not None:
            min_val = -(caps[laurent] if budget is None else budget)
        return cls(names, tuple(caps[n] for n in names), laurent, min_val)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise DomainError(f"unknown variable {name!r} in context {self.variables}") from None

    def cap(self, name: str) -> int:
        return self.caps[self.index(name)]

    @property
    def floors(self) -> tuple[int, ...]:
        return tuple(self.min_valuation if v == self.laurent_variable else 0
                     for v in self.variables)

    # constructors
    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {})

    def one(self) -> "TruncatedSeries":
        return self.const(1)

    def const(self, c) -> "TruncatedSeries":
        if isinstance(c, TruncatedSeries):
            c._check(self)
            return c
        return TruncatedSeries(self, {(0,) * self.nvars: as_fraction(c)})

    def monomial(self, exps: Mapping[str, int] | None = None, coeff=1) -> "TruncatedSeries":
        e = [0] * self.nvars
        for name, k in (exps or {}).items():
            e[self.index(name)] = int(k)
        return TruncatedSeries(self, {tuple(e): as_fraction(coeff)})

    def gen(self, name: str) -> "TruncatedSeries":
        return self.monomial({name: 1})

    def from_terms(self, terms: Mapping[Exps, Scalar]) -> "TruncatedSeries":
        return TruncatedSeries(self, {tuple(e): as_fraction(c) for e, c in terms.items()})

    def polynomial(self, name: str, coeffs: Sequence) -> "TruncatedSeries":
        """``sum(coeffs[i] * name**i)`` where coefficients may be scalars or series."""
        g = self.gen(name)
        out = self.zero()
        power = self.one()
        for c in coeffs:
            out = out + power * c
            power = power * g
        return out

    def with_caps(self, **caps: int) -> "SeriesContext":
        new = list(self.caps)
        for name, c in caps.items():
            new[self.index(name)] = c
        return SeriesContext(self.variables, tuple(new), self.laurent_variable, self.min_valuation)

    def without(self, names: Iterable[str]) -> "SeriesContext":
        drop = set(names)
        keep = [i for i, v in enumerate(self.variables) if v not in drop]
        laurent = self.laurent_variable if self.laurent_variable not in drop else None
        return SeriesContext(tuple(self.variables[i] for i in keep),
                             tuple(self.caps[i] for i in keep),
                             laurent, self.min_valuation if laurent else 0)


def _add_inf(a, b):
    return INF if a == INF or b == INF else a + b


class TruncatedSeries:
    """Immutable truncated series; see the module docstring for the precision model."""

    __slots__ = ("ctx", "terms", "prec", "val")

    def __init__(self, ctx: SeriesContext, terms: Mapping[Exps, Fraction],
                 prec: Sequence | None = None, val: Sequence | None = None):
        nv = ctx.nvars
        prec = [INF] * nv if prec is None else list(prec)
        caps, floors = ctx.caps, ctx.floors
        kept = {}
        for e, c in terms.items():
            if not c:
                continue
            for i in range(nv):
                if e[i] < floors[i]:
                    raise ValuationError(
                        f"exponent {e[i]} of {ctx.variables[i]} is below the "
                        f"context floor {floors[i]}")
            outside = False
            for i in range(nv):
                if e[i] > caps[i]:
                    prec[i] = min(prec[i], caps[i] + 1)
                    outside = True
                elif e[i] >= prec[i]:
                    outside = True
            if not outside:
                kept[e] = c
        # anything at or beyond prec is unknown and dropped above
        kept = {e: c for e, c in kept.items() if all(e[i] < prec[i] for i in range(nv))}
        self.ctx = ctx
        self.terms = kept
        self.prec = tuple(prec)
        if val is None or all(p == INF for p in self.prec):
            val = self._stored_min()
        self.val = tuple(val)

    def _stored_min(self):
        nv = self.ctx.nvars
        if not self.terms:
            return tuple(self.prec)
        return tuple(min(e[i] for e in self.terms) for i in range(nv))

    # --- basic protocol -----------------------------------------------------

    def _check(self, ctx):
        if self.ctx != ctx:
            raise ContextMismatchError(f"context mismatch: {self.ctx} vs {ctx}")

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            other._check(self.ctx)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    @property
    def is_exact(self) -> bool:
        return all(p == INF for p in self.prec)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, exps: Mapping[str, int] | Exps | None = None) -> Fraction:
        if exps is None:
            e = (0,) * self.ctx.nvars
        elif isinstance(exps, Mapping):
            e = [0] * self.ctx.nvars
            for name, k in exps.items():
                e[self.ctx.index(name)] = k
            e = tuple(e)
        else:
            e = tuple(exps)
        if any(e[i] >= self.prec[i] for i in range(len(e))):
            raise PrecisionError(f"coefficient {e} is beyond the known precision {self.prec}")
        return self.terms.get(e, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff()

    def valuation(self, grading: str | Sequence[str]) -> float:
        """Least total degree in ``grading`` among the stored terms (inf if none)."""
        names = (grading,) if isinstance(grading, str) else tuple(grading)
        idx = [self.ctx.index(n) for n in names]
        if not self.terms:
            return INF
        return min(sum(e[i] for i in idx) for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items())))

    def __repr__(self):
        return f"TruncatedSeries({', '.join(self.ctx.variables)}: {self}{self._prec_note()})"

    def _prec_note(self):
        finite = [(v, p) for v, p in zip(self.ctx.variables, self.prec) if p != INF]
        if not finite or all(p == c + 1 for (_, p), c in
                             zip(finite, [self.ctx.cap(v) for v, _ in finite])):
            return ""
        return " + O(" + ", ".join(f"{v}^{p}" for v, p in finite) + ")"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}"
                for v, k in zip(self.ctx.variables, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def items(self):
        return sorted(self.terms.items())

    # --- ring operations ----------------------------------------------------

    def __neg__(self):
        return TruncatedSeries(self.ctx, {e: -c for e, c in self.terms.items()}, self.prec, self.val)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        prec = tuple(min(a, b) for a, b in zip(self.prec, other.prec))
        val = tuple(min(a, b) for a, b in zip(self.val, other.val))
        return TruncatedSeries(self.ctx, terms, prec, val)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "TruncatedSeries":
        c = as_fraction(c)
        if not c:
            return TruncatedSeries(self.ctx, {}, self.prec, self.val)
        return TruncatedSeries(self.ctx, {e: c * v for e, v in self.terms.items()}, self.prec, self.val)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        nv = ctx.nvars
        prec = [min(_add_inf(self.prec[i], other.val[i]), _add_inf(other.prec[i], self.val[i]))
                for i in range(nv)]
        limit = [min(ctx.caps[i], prec[i] - 1) for i in range(nv)]
        dropped = [False] * nv
        out: dict = {}
        items_b = list(other.terms.items())
        rng = range(nv)
        for ea, ca in self.terms.items():
            for eb, cb in items_b:
                e = tuple([ea[i] + eb[i] for i in rng])
                for i in rng:
                    if e[i] > limit[i]:
                        dropped[i] = True
                        break
                else:
                    out[e] = out.get(e, 0) + ca * cb
        for i in rng:
            if dropped[i]:
                prec[i] = min(prec[i], limit[i] + 1)
        val = [self.val[i] + other.val[i] for i in rng]
        return TruncatedSeries(ctx, out, prec, val)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise PoleError("division by zero scalar")
            return self.scale(Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.invert()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.invert()

    def shift(self, exps: Mapping[str, int]) -> "TruncatedSeries":
        """Exact multiplication by a monomial (exponents may be negative)."""
        d = [0] * self.ctx.nvars
        for name, k in exps.items():
            d[self.ctx.index(name)] = k
        terms = {tuple(a + b for a, b in zip(e, d)): c for e, c in self.terms.items()}
        prec = [_add_inf(p, k) for p, k in zip(self.prec, d)]
        val = [_add_inf(v, k) for v, k in zip(self.val, d)]
        return TruncatedSeries(self.ctx, terms, prec, val)

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse; a positive valuation in the Laurent variable is allowed.

        The series is written as ``m * a'`` with ``m`` its lowest monomial
        (componentwise minimum of the stored exponents) and ``a'`` a unit; the
        inverse is ``m**-1 * a'**-1``.
        """
        ctx = self.ctx
        nv = ctx.nvars
        if not self.terms:
            raise PoleError("cannot invert the zero series")
        v = self._stored_min()
        for i in range(nv):
            if v[i] != 0 and ctx.variables[i] != ctx.laurent_variable:
                if v[i] > 0:
                    raise PoleError(
                        f"series has positive valuation {v[i]} in non-Laurent "
                        f"variable {ctx.variables[i]}; not invertible here")
            if -v[i] < ctx.floors[i]:
                raise ValuationError(
                    f"inverse needs {ctx.variables[i]}^{-v[i]}, beyond the Laurent "
                    f"budget {ctx.floors[i]}")
        c0 = self.terms.get(tuple(v))
        if not c0:
            raise PoleError("series has no unit part at its lowest monomial")
        unit = [(tuple(e[i] - v[i] for i in range(nv)), c) for e, c in self.terms.items()]
        unit_prec = [self.prec[i] - v[i] if self.prec[i] != INF else INF for i in range(nv)]
        depends = [any(e[i] for e, _ in unit) for i in range(nv)]
        bound = []
        res_prec = []
        for i in range(nv):
            hi = ctx.caps[i] + v[i]
            if unit_prec[i] != INF:
                hi = min(hi, unit_prec[i] - 1)
            bound.append(hi)
            p = unit_prec[i] - v[i] if unit_prec[i] != INF else INF
            if depends[i]:
                p = min(p, hi + 1 - v[i])
            res_prec.append(p)
        if any(b < 0 for b in bound):
            raise PrecisionError("not enough known coefficients to invert")
        rest = [(e, c) for e, c in unit if any(e)]
        inv_c0 = Fraction(1) / c0
        b: dict = {}
        ranges = [range(bound[i] + 1) if depends[i] else range(1) for i in range(nv)]
        for e in itertools.product(*ranges):
            if not any(e):
                b[e] = inv_c0
                continue
            s = 0
            for a, c in rest:
                d = tuple(x - y for x, y in zip(e, a))
                if min(d) < 0:
                    continue
                bd = b.get(d)
                if bd:
                    s += c * bd
            if s:
                b[e] = -s * inv_c0
        terms = {tuple(e[i] - v[i] for i in range(nv)): c for e, c in b.items()}
        return TruncatedSeries(ctx, terms, res_prec, tuple(-x for x in v))

    # --- truncation, comparison, substitution -------------------------------

    def agree(self, other: "TruncatedSeries", caps: Mapping[str, int] | None = None):
        """Compare coefficient-by-coefficient inside ``caps`` (default: context caps).

        Returns ``None`` on exact agreement, otherwise a witness
        ``(monomial, self_coeff, other_coeff)`` for the first differing
        monomial.  Raises :class:`PrecisionError` if either side is not known
        exactly over the requested box.
        """
        other._check(self.ctx)
        box = list(self.ctx.caps)
        for name, c in (caps or {}).items():
            box[self.ctx.index(name)] = c
        for s in (self, other):
            for i, (p, c) in enumerate(zip(s.prec, box)):
                if p <= c:
                    raise PrecisionError(
                        f"{self.ctx.variables[i]} known only below degree {p}, "
                        f"comparison needs {c}")
        keys = set(self.terms) | set(other.terms)
        for e in sorted(keys, key=lambda e: (sum(e), e)):
            if any(e[i] > box[i] for i in range(len(e))):
                continue
            a, b = self.terms.get(e, Fraction(0)), other.terms.get(e, Fraction(0))
            if a != b:
                return dict(zip(self.ctx.variables, e)), a, b
        return None

    def truncate(self, caps: Mapping[str, int]) -> "TruncatedSeries":
        ctx = self.ctx.with_caps(**caps)
        return TruncatedSeries(ctx, self.terms, self.prec, self.val)

    def specialize(self, point: Mapping[str, Scalar] | "RationalPoint",
                   poles: Mapping[str, Iterable[Scalar]] | None = None) -> "TruncatedSeries":
        """Substitute exact rationals for some variables (see :func:`ts_specialize`)."""
        if isinstance(point, RationalPoint):
            values = dict(point.values)
        else:
            values = {k: as_fraction(v) for k, v in point.items()}
        for name, value in values.items():
            if value in {as_fraction(p) for p in (poles or {}).get(name, ())}:
                raise PoleError(f"{name}={value} is a declared pole")
        idx = {self.ctx.index(n): v for n, v in values.items()}
        for i in idx:
            if self.prec[i] != INF:
                raise DomainError(
                    f"cannot specialize {self.ctx.variables[i]}: the series is "
                    f"truncated (graded) in that variable")
        new_ctx = self.ctx.without(values)
        keep = [i for i in range(self.ctx.nvars) if i not in idx]
        out: dict = {}
        for e, c in self.terms.items():
            for i, value in idx.items():
                if e[i] < 0 and value == 0:
                    raise PoleError(f"{self.ctx.variables[i]}=0 hits a negative power")
                c = c * value ** e[i]
            key = tuple(e[i] for i in keep)
            out[key] = out.get(key, 0) + c
        return TruncatedSeries(new_ctx, out, [self.prec[i] for i in keep])


# --- functional front door ---------------------------------------------------

def ts_arith(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    a._check(b.ctx)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise DomainError(f"unknown operation {op!r}")


def ts_invert(a: TruncatedSeries) -> TruncatedSeries:
    return a.invert()


def ts_specialize(a: TruncatedSeries, point, poles=None) -> TruncatedSeries:
    return a.specialize(point, poles)


@dataclass(frozen=True)
class RationalPoint:
    values: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        values = self.values.values if isinstance(self.values, RationalPoint) else self.values
        object.__setattr__(self, "values",
                           {k: as_fraction(v) for k, v in dict(values).items()})

    def __getitem__(self, name):
        return self.values[name]

    def get(self, name, default=None):
        return self.values.get(name, default)

    def __contains__(self, name):
        return name in self.values

    def swapped(self, a: str, b: str) -> "RationalPoint":
        vals = dict(self.values)
        vals[a], vals[b] = self.values[b], self.values[a]
        return RationalPoint(vals)

    def replace(self, **kw) -> "RationalPoint":
        vals = dict(self.values)
        vals.update({k: as_fraction(v) for k, v in kw.items()})
        return RationalPoint(vals)

    def to_json(self) -> dict:
        return {k: format_fraction(v) for k, v in sorted(self.values.items())}


DEFAULT_POOL = tuple(Fraction(p) for p in (
    "1/2", "-1/2", "1/3", "-1/3", "2/5", "-2/5", "3/7", "-3/7", "5/7",
    "4/9", "-4/9", "3/4", "-3/4", "5/3", "-5/3", "2/7", "7/5", "-6/5",
))


def sample_point(names: Sequence[str], rng: random.Random,
                 admissible: Callable[[RationalPoint], bool] = lambda p: True,
                 pool: Sequence[Fraction] = DEFAULT_POOL,
                 attempts: int = 200) -> RationalPoint:
    """Draw distinct pool values for ``names``, re-drawing on pole hits."""
    for _ in range(attempts):
        values = rng.sample(list(pool), len(names))
        point = RationalPoint(dict(zip(names, values)))
        if admissible(point):
            return point
    raise PoleError(f"no admissible point for {tuple(names)} after {attempts} draws")


# --- reciprocal variables ----------------------------------------------------

def expand_at_infinity(numerator: Sequence, denominator: Sequence,
                       ctx: SeriesContext, var: str) -> TruncatedSeries:
    """Expand ``P(u) / Q(u)`` in ``var`` = 1/u.

    ``numerator`` and ``denominator`` list the coefficients of ``u**0,
    u**1, ...`` (scalars or series free of ``var``).  Since ``P(1/w)/Q(1/w) =
    w**(deg Q - deg P) * rev(P)(w) / rev(Q)(w)``, the expansion is a power
    series exactly when ``deg P <= deg Q``; otherwise the rational function
    has a pole at infinity and ``DomainError`` is raised.
    """
    def trim(cs):
        cs = list(cs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        return cs

    num, den = trim(numerator), trim(denominator)
    if not den:
        raise PoleError("zero denominator")
    if not num:
        return ctx.zero()
    dp, dq = len(num) - 1, len(den) - 1
    if dp > dq:
        raise DomainError(
            f"degree {dp} numerator over degree {dq} denominator has positive "
            f"grading in the reciprocal variable")
    rev_num = ctx.polynomial(var, num[::-1])
    rev_den = ctx.polynomial(var, den[::-1])
    return rev_num * rev_den.invert() * ctx.monomial({var: dq - dp})


def _is_zero(c) -> bool:
    if isinstance(c, TruncatedSeries):
        return c.is_zero() and c.is_exact
    return c == 0


# --- q-series ---------------------------------------------------------------

def qpochhammer(a: TruncatedSeries, q: TruncatedSeries, k: int) -> TruncatedSeries:
    """``(a; q)_k = prod_{i<k} (1 - a q^i)``."""
    if k < 0:
        raise DomainError("k must be non-negative")
    out = a.ctx.one()
    qi = a.ctx.one()
    for _ in range(k):
        out = out * (1 - a * qi)
        qi = qi * q
    return out


def qpochhammer_multi(params: Sequence[TruncatedSeries], q: TruncatedSeries, k: int) -> TruncatedSeries:
    out = q.ctx.one()
    for a in params:
        out = out * qpochhammer(a, q, k)
    return out


def hypergeometric_terms(uppers: Sequence[TruncatedSeries], lowers: Sequence[TruncatedSeries],
                         q: TruncatedSeries, z: TruncatedSeries) -> Iterator[TruncatedSeries]:
    """Yield the successive terms of the basic hypergeometric series.

    Term ``k`` is ``(a;q)_k / (q, b;q)_k * ((-1)^k q^C(k,2))^(1+beta-alpha) z^k``.
    Upper parameters equal to a lower one (``q`` counts as lower) cancel
    before evaluation.  Each term is obtained from the previous one through
    the ratio ``prod(1 - a q^k) / prod(1 - b q^k)``, whose factors are
    inverted individually so that Laurent divisions stay exact.
    """
    alpha, beta = len(uppers), len(lowers)
    ups = list(uppers)
    downs = [q] + list(lowers)
    for a in list(ups):
        for j, b in enumerate(downs):
            if a == b:
                ups.remove(a)
                del downs[j]
                break
    expo = 1 + beta - alpha
    ctx = q.ctx
    term = ctx.one()
    qk = ctx.one()
    k = 0
    while True:
        yield term
        ratio = z
        for a in ups:
            ratio = ratio * (1 - a * qk)
        for b in downs:
            ratio = ratio * (1 - b * qk).invert()
        if expo:
            ratio = ratio * (-qk) ** expo
        term = term * ratio
        qk = qk * q
        k += 1


def basic_hypergeometric(uppers, lowers, q, z, kmax: int) -> TruncatedSeries:
    """Partial sum of the basic hypergeometric series through ``k = kmax``."""
    if kmax < 0:
        raise DomainError("kmax must be non-negative")
    total = q.ctx.zero()
    for k, term in zip(range(kmax + 1), hypergeometric_terms(uppers, lowers, q, z)):
        total = total + term
    return total


# --- guarded infinite sums ---------------------------------------------------

def bounded_sum(term: Callable[[int], TruncatedSeries], grading: str | Sequence[str],
                valuation_bound: Callable[[int], int], ctx: SeriesContext,
                start: int = 1) -> TruncatedSeries:
    """Sum ``term(n)`` for ``n >= start`` while ``valuation_bound(n)`` fits the caps.

    ``grading`` names one variable or several (total degree).  Every summed
    term is checked to have valuation at least ``valuation_bound(n)``; the
    omitted tail then lies outside the cap box, so the truncated sum is
    exact.  A term violating its claimed bound raises
    :class:`ValuationError` carrying the index.
    """
    names = (grading,) if isinstance(grading, str) else tuple(grading)
    cap = sum(ctx.cap(n) for n in names)
    total = ctx.zero()
    n = start
    while valuation_bound(n) <= cap:
        s = term(n)
        s._check(ctx)
        actual = s.valuation(names)
        bound = valuation_bound(n)
        if actual < bound:
            raise ValuationError(
                f"term {n} has valuation {actual} in {'+'.join(names)}, "
                f"below the claimed bound {bound}", index=n)
        total = total + s
        n += 1
    return total
