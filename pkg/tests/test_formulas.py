from fractions import Fraction as F

import pytest

from eulerstirling.errors import DomainError, PoleError
from eulerstirling.formulas import (
    FORMULAS, EvalPlan, compare, h_series, lhs_series, rhs_adr, rhs_asczeromax,
    rhs_cor1_mid, rhs_gg1, rhs_thm1, rhs_thm4, tf43_sides, verify_formula,
)
from eulerstirling.series import RationalPoint

from oracles import ADR1_U0, ASC_U0, GG1_X1U1

PT_THM1 = {"x": F(1, 3), "v": F(2, 5), "q": F(3, 7)}


def plan(fid, point=None, **caps):
    return FORMULAS[fid].plan(point or {}, caps)


# --- left sides ------------------------------------------------------------------

def test_gg1_lhs_constant_term():
    p = plan("gg1", t=5, x=2, u=2)
    lhs = lhs_series(p)
    assert [lhs.coeff({"t": k}) for k in range(6)] == [1] * 6


def test_g5_low_orders():
    p = EvalPlan("thm4", {"t": 3, "x": 3, "u": 3}, RationalPoint({"v": 1, "z": 1}))
    lhs = lhs_series(p, {"u": "des", "x": "ides", "v": "rmax", "z": "lmax"})
    ctx = lhs.ctx
    u, x = ctx.gen("u"), ctx.gen("x")
    # [t^1] = 1/((1-u)(1-x))
    t1 = ((1 - u) * (1 - x)).invert()
    for i in range(4):
        for j in range(4):
            assert lhs.coeff({"t": 1, "u": i, "x": j}) == t1.coeff({"u": i, "x": j})
    # [t^3] * (1-u)^3 (1-x)^3 = sum over S_3 of u^des x^ides
    p3 = EvalPlan("thm4", {"t": 3, "x": 6, "u": 6}, RationalPoint({"v": 1, "z": 1}))
    full = lhs_series(p3, {"u": "des", "x": "ides", "v": "rmax", "z": "lmax"})
    c = full.ctx
    cube = ((1 - c.gen("u")) * (1 - c.gen("x"))) ** 3
    poly = {}
    for (ti, ui, xi), val in (full * cube).terms.items():
        if ti == 3 and ui <= 2 and xi <= 2 and val:
            poly[(ui, xi)] = val
    assert sum(poly.values()) == 6
    assert poly == {(0, 0): 1, (1, 1): 4, (2, 2): 1}


def test_invseq_path_agrees():
    p = plan("thm1", PT_THM1, t=6, u=4)
    assert lhs_series(p) == lhs_series(p, source="invseq")
    p = plan("adr2", {"x": F(1, 3), "v": F(2, 5)}, t=6, ubar=4)
    assert lhs_series(p) == lhs_series(p, source="invseq")


def test_lhs_preconditions():
    p = plan("gg1", t=4, x=2, u=2)
    with pytest.raises(DomainError):
        lhs_series(p, n_max=3)
    with pytest.raises(DomainError):
        lhs_series(p, source="trees")


def test_plan_validation():
    with pytest.raises(DomainError):
        EvalPlan("gg1", {"t": 3}, RationalPoint({"t": 1}))
    with pytest.raises(DomainError):
        EvalPlan("gg1", {"t": -1})


# --- right sides: oracle values --------------------------------------------------------

def test_gg1_oracles():
    r = rhs_gg1(plan("gg1", t=5, x=2, u=2))
    assert [r.coeff({"t": k, "x": 1, "u": 1}) for k in range(4)] == GG1_X1U1
    assert [r.coeff({"t": k}) for k in range(6)] == [1] * 6
    assert [r.coeff({"t": k, "x": 1}) for k in range(4)] == [1, 2, 3, 4]


def test_adr1_u_constant():
    p = plan("adr1", {"x": F(1, 3), "v": F(2, 5)}, t=5, u=3)
    r = rhs_adr(p, "adr1")
    assert [r.coeff({"t": k}) for k in range(6)] == ADR1_U0
    assert [lhs_series(p).coeff({"t": k}) for k in range(6)] == ADR1_U0


def test_asczeromax_u_constant():
    p = plan("asczeromax", {"q": F(3, 7), "z": F(2, 5)}, t=5, u=2)
    r = rhs_asczeromax(p)
    assert [r.coeff({"t": k}) for k in range(6)] == ASC_U0


def test_thm1_first_order():
    p = plan("thm1", PT_THM1, t=4, u=5)
    r = rhs_thm1(p)
    x, v, q = PT_THM1["x"], PT_THM1["v"], PT_THM1["q"]
    # q v / ((1 - u)(1 - x)) as a u-series
    for k in range(6):
        assert r.coeff({"t": 1, "u": k}) == q * v / (1 - x)


def test_cor1_constant_and_lowest_term():
    p = plan("cor1_mid", {"x": F(1, 3)}, t=4, ubar=1)
    mid = rhs_cor1_mid(p)
    # 1/((u-1)(x-1)) = ubar / ((1 - ubar)(x - 1)), so the ubar^0 part vanishes
    for k in range(5):
        assert mid.coeff({"t": k, "ubar": 0}) == 0
    # the n = 1 sum term starts at ubar^2; ubar^1 comes from the constant only
    assert mid.coeff({"t": 0, "ubar": 1}) == 1 / (F(1, 3) - 1)
    assert mid.coeff({"t": 1, "ubar": 1}) == 0


def test_thm4_z1_collapse():
    pt = {"x": F(1, 3), "v": F(2, 5), "z": F(1)}
    p = plan("thm4", pt, t=5, ubar=3)
    assert rhs_thm4(p).agree(rhs_adr(p, "adr2"), p.caps) is None


# --- symmetric series and the transformation ----------------------------------------------

def test_h1_symmetry_example():
    p = plan("h1", {"v": F(2, 5), "q": F(3, 7)}, t=6, x=3, u=3)
    assert h_series(p).agree(h_series(p, swap=[("x", "u")]), p.caps) is None


def test_h1tilde_at_a_zero():
    pt = {"x": F(1, 3), "u": F(1, 2), "v": F(2, 5), "q": F(3, 7), "a": F(0)}
    p = plan("h1tilde", pt, t=6)
    base = h_series(p)
    for swap in ([("x", "u")], [("v", "q")]):
        assert base.agree(h_series(p, swap=swap), p.caps) is None


def test_tf43_examples():
    pt = {"a": F(1, 2), "b": F(1, 3), "c": F(2, 5), "d": F(3, 7), "e": F(5, 7)}
    p = plan("tf43", pt, r=8)
    for j in (0, 1):
        lhs, rhs = tf43_sides(p, j)
        assert lhs.agree(rhs, p.caps) is None
    lhs0, rhs0 = tf43_sides(p, 0, kmax=0)
    assert lhs0 == p.context().one() and rhs0 == lhs0
    with pytest.raises(DomainError):
        tf43_sides(p, -1)


# --- verification plumbing --------------------------------------------------------------

@pytest.mark.parametrize("fid", ["gg1", "adr1", "asczeromax", "h2", "tf43"])
def test_verify_small_caps(fid):
    caps = {"t": 5}
    reports = verify_formula(fid, caps, points=2, seed=1)
    assert reports and all(r.passed for r in reports), [r.witness for r in reports]


def test_mismatched_points_fail_with_witness():
    a = plan("adr1", {"x": F(1, 3), "v": F(2, 5)}, t=4, u=3)
    b = plan("adr1", {"x": F(1, 3), "v": F(3, 7)}, t=4, u=3)
    rep = compare("adr1:mismatch", a, lhs_series(a), rhs_adr(b, "adr1"), 0.0)
    assert not rep.passed
    w = rep.witness
    assert w["monomial"] == {"t": 1}
    assert w["lhs_coeff"] != w["rhs_coeff"]


def test_reports_are_reproducible():
    one = [r.to_json(False) for r in verify_formula("adr2", {"t": 4, "ubar": 3}, 2, seed=7)]
    two = [r.to_json(False) for r in verify_formula("adr2", {"t": 4, "ubar": 3}, 2, seed=7)]
    assert one == two


def test_explicit_pole_point_raises():
    with pytest.raises(PoleError):
        verify_formula("adr1", {"t": 3, "u": 2}, explicit_points=[{"x": 1, "v": F(1, 2)}])


def test_unknown_formula():
    with pytest.raises(DomainError):
        verify_formula("thm9")
    with pytest.raises(DomainError):
        verify_formula("gg1", points=0)
