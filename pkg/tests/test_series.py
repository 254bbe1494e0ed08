import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerstirling.errors import (ContextMismatchError, DomainError, PoleError,
                                  PrecisionError, ValuationError)
from eulerstirling.series import (
    RationalPoint, SeriesContext, TruncatedSeries, as_fraction, basic_hypergeometric,
    bounded_sum, expand_at_infinity, format_fraction, qpochhammer, qpochhammer_multi,
    sample_point, ts_arith, ts_invert, ts_specialize,
)

from oracles import INV_2_MINUS_T, PHI11_K3, PHI21_K2

T3 = SeriesContext(("t",), (3,))
T2 = SeriesContext(("t",), (2,))
TU = SeriesContext(("t", "u"), (3, 2))

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def series_in(ctx, unit=False):
    box = [(i, j) for i in range(ctx.caps[0] + 1) for j in range(ctx.caps[1] + 1)]
    coeffs = st.lists(fractions, min_size=len(box), max_size=len(box))

    def build(cs):
        terms = dict(zip(box, cs))
        if unit and not terms[(0, 0)]:
            terms[(0, 0)] = F(1)
        return ctx.from_terms(terms)
    return coeffs.map(build)


# --- examples --------------------------------------------------------------------

def test_arith_examples():
    t = T2.gen("t")
    assert ts_arith(1 + t, 1 - t, "mul") == 1 - t ** 2
    f = 3 + t
    assert ts_arith(f, T2.zero(), "add") == f
    assert ts_arith(1 + t + t ** 2, 1 + t, "mul") == T2.polynomial("t", [1, 2, 2])
    with pytest.raises(DomainError):
        ts_arith(f, f, "div")


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        T2.gen("t") + T3.gen("t")


def test_invert_examples():
    t = T3.gen("t")
    assert ts_invert(1 - t) == T3.polynomial("t", [1, 1, 1, 1])
    assert [ts_invert(2 - t).coeff({"t": k}) for k in range(4)] == INV_2_MINUS_T
    lt = SeriesContext.of({"t": 3}, laurent="t")
    r = 1 - lt.gen("t")
    assert ts_invert(r ** 1 - 1) == lt.monomial({"t": -1}, -1)


def test_invert_errors():
    t = T3.gen("t")
    with pytest.raises(PoleError):
        T3.zero().invert()
    with pytest.raises(PoleError):
        t.invert()
    lt = SeriesContext.of({"t": 3}, laurent="t", budget=1)
    with pytest.raises(ValuationError):
        (lt.gen("t") ** 2).invert()


def test_laurent_precision_is_tracked():
    lt = SeriesContext.of({"t": 4}, laurent="t")
    t = lt.gen("t")
    r = 1 - t
    ratio = (r ** 3 - 1) * (r ** 2 - 1).invert()
    # (3 - 3t + t^2) / (2 - t)
    assert [ratio.coeff({"t": k}) for k in range(4)] == [F(3, 2), F(-3, 4), F(1, 8), F(1, 16)]
    with pytest.raises(PrecisionError):
        ratio.coeff({"t": 5})


def test_specialize_examples():
    ctx = SeriesContext(("t", "u", "x"), (1, 1, 1))
    u, x, t = ctx.gen("u"), ctx.gen("x"), ctx.gen("t")
    out = ts_specialize(1 + u * x, {"u": F(1, 2)})
    assert out.ctx.variables == ("t", "x")
    assert out == out.ctx.polynomial("x", [1, F(1, 2)])
    c = ctx.const(F(7, 3))
    assert ts_specialize(c, {"u": 5}).constant_term() == F(7, 3)
    s = ts_specialize(x - (1 - t), RationalPoint({"x": F(1, 3)}))
    assert s.coeff({"t": 0}) == F(-2, 3) and s.coeff({"t": 1}) == 1
    with pytest.raises(PoleError):
        ts_specialize(1 + u, {"u": 1}, poles={"u": [1]})


def test_specialize_refuses_graded_variable():
    t = T3.gen("t")
    trunc = (1 - t).invert()
    with pytest.raises(DomainError):
        trunc.specialize({"t": F(1, 2)})


def test_reciprocal_examples():
    ctx = SeriesContext(("ubar",), (2,))
    ubar = ctx.gen("ubar")
    assert expand_at_infinity([1], [0, 1], ctx, "ubar") == ubar
    assert expand_at_infinity([0, 1], [-1, 1], ctx, "ubar") == 1 + ubar + ubar ** 2
    assert expand_at_infinity([1], [1, -1], ctx, "ubar") == -ubar - ubar ** 2
    with pytest.raises(DomainError):
        expand_at_infinity([0, 1], [1], ctx, "ubar")


def test_fraction_io():
    assert as_fraction("3/6") == F(1, 2)
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert format_fraction(F(-4, 2)) == "-2/1"


def test_sample_point_avoids_poles():
    rng = random.Random(3)
    for _ in range(20):
        p = sample_point(("x", "v"), rng, lambda p: p["x"] != F(1, 2))
        assert p["x"] != F(1, 2)
    with pytest.raises(PoleError):
        sample_point(("x",), rng, lambda p: False, attempts=5)


# --- q-series ---------------------------------------------------------------------

def test_qpochhammer_examples():
    ctx = SeriesContext(("a", "q"), (3, 3))
    a, q = ctx.gen("a"), ctx.gen("q")
    assert qpochhammer(a, q, 0) == ctx.one()
    assert qpochhammer(a, q, 1) == 1 - a
    assert qpochhammer(a, q, 2) == (1 - a) * (1 - a * q)
    assert qpochhammer_multi([a, q], q, 1) == (1 - a) * (1 - q)


def test_qpochhammer_recurrence():
    ctx = SeriesContext(("a", "q"), (4, 12))
    a, q = ctx.gen("a"), ctx.gen("q")
    for k in range(9):
        assert qpochhammer(a, q, k + 1) == qpochhammer(a, q, k) * (1 - a * q ** k)


def _scalar_ctx():
    return SeriesContext((), ())


def test_hypergeometric_hand_sums():
    ctx = _scalar_ctx()
    a, b, c, q, z = (ctx.const(F(s)) for s in ("1/2", "1/3", "2/5", "3/7", "5/7"))
    assert basic_hypergeometric([a, b], [c], q, z, 2).constant_term() == PHI21_K2
    assert basic_hypergeometric([a], [c], q, z, 3).constant_term() == PHI11_K3
    assert basic_hypergeometric([a, b], [c], q, z, 0) == ctx.one()


def test_hypergeometric_upper_one_terminates():
    ctx = SeriesContext(("t",), (5,))
    t = ctx.gen("t")
    q = ctx.const(F(1, 3))
    for kmax in (0, 1, 4):
        # (1; q)_k vanishes for k >= 1, so only the k = 0 term survives
        assert basic_hypergeometric([ctx.one(), 1 + t], [2 + t], q, 1 - t, kmax) == ctx.one()


# --- bounded sums -------------------------------------------------------------------

def test_bounded_sum_single_grading():
    calls = []

    def term(n):
        calls.append(n)
        return T3.gen("t") ** n
    out = bounded_sum(term, "t", lambda n: n, T3)
    assert calls == [1, 2, 3]
    assert out == T3.polynomial("t", [0, 1, 1, 1])


def test_bounded_sum_pair_grading():
    ctx = SeriesContext(("x", "u"), (2, 2))
    x, u = ctx.gen("x"), ctx.gen("u")
    seen = []

    def outer(n):
        def inner(k):
            seen.append((n, k))
            return x ** (n - 1) * u ** (k - 1)
        return bounded_sum(inner, "u", lambda k: k - 1, ctx)
    bounded_sum(outer, "x", lambda n: n - 1, ctx)
    assert max(n for n, _ in seen) == 3 and max(k for _, k in seen) == 3


def test_bounded_sum_rejects_low_valuation():
    ctx = SeriesContext(("u",), (4,))
    u = ctx.gen("u")

    def term(n):
        return u ** (n - 1) if n != 3 else u
    with pytest.raises(ValuationError) as exc:
        bounded_sum(term, "u", lambda n: n - 1, ctx)
    assert exc.value.index == 3


# --- property battery -----------------------------------------------------------------

@settings(max_examples=100)
@given(series_in(TU), series_in(TU), series_in(TU))
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == TU.zero()


@settings(max_examples=100)
@given(series_in(TU, unit=True))
def test_invert_roundtrip(a):
    assert a * a.invert() == TU.one()


@settings(max_examples=50)
@given(st.lists(fractions, min_size=1, max_size=4).filter(lambda cs: cs[0] != 0),
       st.integers(1, 3))
def test_laurent_invert_roundtrip(coeffs, shift):
    ctx = SeriesContext.of({"t": 5}, laurent="t")
    f = ctx.polynomial("t", coeffs).shift({"t": shift})
    prod = f * f.invert()
    assert prod.agree(ctx.one(), {"t": 5 - shift}) is None


@settings(max_examples=50)
@given(series_in(TU))
def test_truncate_commutes_with_product(a):
    small = {"t": 1, "u": 1}
    lhs = (a * a).truncate(small)
    rhs = a.truncate(small) * a.truncate(small)
    assert lhs.terms == rhs.terms
