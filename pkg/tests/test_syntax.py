from hypothesis import given, strategies as st

from svr import syntax as S
from svr.syntax import (
    UNIT, App, Ctor, Lam, Mu, Process, Push, Record, SVar, TVar, Var,
    alpha_eq, free_vars, fresh_names, pretty, subst,
)

import gen

x, y, a, alpha, beta = Var("x"), Var("y"), TVar("a"), SVar("α"), SVar("β")
ID = Lam("x", x)


def test_free_vars_of_identity_is_empty():
    assert free_vars(ID) == S.EMPTY
    assert S.is_closed(ID)


def test_free_vars_mu_binds_stack_variable():
    fv = free_vars(Mu("α", Process(x, alpha)))
    assert fv.lam == {"x"} and not fv.mu and not fv.term


def test_free_vars_term_variable_against_stack():
    fv = free_vars(Process(a, beta))
    assert fv.term == {"a"} and fv.mu == {"β"} and not fv.lam


def test_subst_avoids_capture():
    out = subst(Lam("x", y), y, x)
    assert isinstance(out, Lam) and out.var != "x"
    assert out.body == x
    assert alpha_eq(out, Lam("z", x))


def test_subst_stack_variable():
    out = subst(Process(x, alpha), alpha, Push(UNIT, beta))
    assert out == Process(x, Push(UNIT, beta))


def test_subst_term_variable_duplicates():
    assert subst(App(a, a), a, ID) == App(ID, ID)


def test_subst_rejects_non_value_for_lambda_variable():
    try:
        subst(x, x, App(ID, ID))
    except TypeError:
        return
    raise AssertionError("expected a TypeError")


def test_alpha_eq_examples():
    assert alpha_eq(Lam("x", x), Lam("y", y))
    assert not alpha_eq(Lam("x", Lam("y", x)), Lam("y", Lam("x", x)))
    v = Ctor("C", UNIT)
    assert alpha_eq(Mu("α", Process(v, alpha)), Mu("β", Process(v, beta)))


def test_record_labels_are_unordered_and_distinct():
    assert Record((("m", UNIT), ("l", UNIT))) == Record((("l", UNIT), ("m", UNIT)))
    try:
        Record((("l", UNIT), ("l", UNIT)))
    except ValueError:
        return
    raise AssertionError("duplicate labels accepted")


def test_pretty_uses_calculus_notation():
    p = Process(App(ID, UNIT), S.Frame(ID, Push(Ctor("C", UNIT), alpha)))
    assert pretty(p) == "(λx x) {} ∗ [λx x]C[].α"
    assert pretty(Mu("α", Process(x, alpha))) == "μα (x ∗ α)"


def test_fresh_names_are_reproducible():
    with fresh_names():
        first = [S.fresh("x") for _ in range(3)]
    with fresh_names():
        second = [S.fresh("x") for _ in range(3)]
    assert first == second and len(set(first)) == 3


def test_every_stack_bottoms_out_in_a_variable():
    assert S.stack_bottom(Push(UNIT, S.Frame(ID, beta))) == beta


# -- properties --------------------------------------------------------------

@given(gen.term_st(), st.sampled_from(["x", "y", "z"]), gen.value_st(2))
def test_subst_lambda_free_vars(t, name, v):
    fv = free_vars(t)
    out = free_vars(subst(t, Var(name), v))
    if name in fv.lam:
        assert out.lam == (fv.lam - {name}) | free_vars(v).lam
        assert out.term == fv.term | free_vars(v).term
    else:
        assert alpha_eq(subst(t, Var(name), v), t)


@given(gen.term_st(), st.sampled_from(["a", "b"]), gen.term_st(2))
def test_subst_term_free_vars(t, name, u):
    fv = free_vars(t)
    out = free_vars(subst(t, TVar(name), u))
    if name in fv.term:
        assert out.term == (fv.term - {name}) | free_vars(u).term
        assert out.lam == fv.lam | free_vars(u).lam
    else:
        assert alpha_eq(subst(t, TVar(name), u), t)


@given(gen.term_st(), st.sampled_from(["α", "β"]), gen.stack_st(2))
def test_subst_stack_free_vars(t, name, pi):
    fv = free_vars(t)
    out = free_vars(subst(t, SVar(name), pi))
    if name in fv.mu:
        assert out.mu == (fv.mu - {name}) | free_vars(pi).mu
    else:
        assert alpha_eq(subst(t, SVar(name), pi), t)


@given(gen.term_st())
def test_alpha_eq_stable_under_fresh_renaming(t):
    def rename(u):
        match u:
            case Lam(v, b):
                n = S.fresh(v)
                return Lam(n, rename(subst(b, Var(v), Var(n))))
            case Mu(al, b):
                n = S.fresh(al)
                return Mu(n, rename(subst(b, SVar(al), SVar(n))))
        return u
    assert alpha_eq(rename(t), t)


@given(gen.term_st())
def test_alpha_key_is_an_equivalence_fingerprint(t):
    assert alpha_eq(t, t)
    assert S.alpha_key(t) == S.alpha_key(S.subst_many(t))
