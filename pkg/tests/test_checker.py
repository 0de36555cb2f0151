import json

import pytest
from hypothesis import given, settings, strategies as st

from svr import formulas as F
from svr import syntax as S
from svr.checker import (
    ALL_E, AX, IMP_I, PALL_I, CheckFailure, Checker, Derivation, Judgement, MACRO_PI_E,
    apply_semantical_restriction, derivation_json, derivation_text, expand_macros,
    strip_certificates, validate, validation_error,
)
from svr.driver import elaborate, parse_in_scope
from svr.formulas import BOT, EquivHyp, LambdaHyp, Named, PredApp, PredDecl, TermDecl
from svr.surface import parse_formula
from svr.syntax import UNIT, App, Ctor, Lam, TVar, Var

ID = Lam("x", Var("x"))
POLY_ID = parse_formula("∀X (X ⇒ X)")

PLUS = """type nat = Z[] | S[nat]
let rec plus (n : nat) (m : nat) : nat = match n with | Z[] → m | S[nn] → S[plus nn m]
val f : Πn:nat (n ≡ n)
"""


@pytest.fixture(scope="module")
def plus_module():
    el = elaborate(PLUS)
    assert el.ok
    return el


def test_polymorphic_identity():
    d = Checker().check_value((), ID, POLY_ID)
    assert d.rules() == [PALL_I, IMP_I, "↑", AX]
    assert validate(d)


def test_constructor_against_unrelated_variant_fails():
    A = parse_formula("[D : {}]")
    with pytest.raises(CheckFailure) as e:
        Checker().check_value((), Ctor("C", UNIT), A)
    assert e.value.reason == "rule mismatch"


def test_identity_is_not_a_proof_of_falsity():
    with pytest.raises(CheckFailure) as e:
        Checker().check_value((), ID, BOT)
    assert e.value.reason == "rule mismatch"


def test_scissors_in_a_contradictory_context():
    ctx = (EquivHyp(Ctor("C", UNIT), Ctor("D", UNIT)),)
    d = Checker().check_term(ctx, S.Scissors(), BOT)
    assert "✂" in d.rules() and validate(d)


def test_scissors_rejected_in_a_consistent_context():
    with pytest.raises(CheckFailure):
        Checker().check_term((), S.Scissors(), BOT)


def test_invalid_context_is_reported():
    ctx = (LambdaHyp("x", F.TOP), LambdaHyp("x", F.TOP))
    with pytest.raises(CheckFailure) as e:
        Checker().check_term(ctx, Var("x"), F.TOP)
    assert e.value.reason == "context invalid"


def test_unknown_equivalence_carries_the_claim():
    ctx = (TermDecl("a"), TermDecl("b"))
    goal = F.sugar_equation(TVar("a"), TVar("b"))
    with pytest.raises(CheckFailure) as e:
        Checker().check_term(ctx, S.Scissors(), goal)
    assert e.value.reason == "equivalence Unknown"
    assert e.value.claim is not None and str(e.value.claim) == "a ≡ b"
    assert e.value.to_json()["claim"] == "a ≡ b"


def test_intro_proofs_use_the_expected_rules(intro_source):
    el = elaborate(intro_source)
    items = {i.name: i for i in el.items}
    zero_n = items["addZeroN"].derivation.rules()
    assert {"∀ᵢ", "⇒ᵢ", "∈ₑ", "↾ᵢ", "≡"} <= set(zero_n)
    n_zero = items["addNZero"].derivation.rules()
    assert {"+ₑ", "⇒ₑ", "∀ₑ", "≡"} <= set(n_zero)
    for name in ("addZeroN", "addNZero"):
        assert validate(items[name].derivation, el.types)


def test_semantical_restriction(plus_module):
    el = plus_module
    u = parse_in_scope(el, "plus Z[] Z[]")
    v, verdict = apply_semantical_restriction(el.ctx, u)
    assert v == Ctor("Z", UNIT) and verdict.certificate
    assert apply_semantical_restriction((), UNIT)[0] == UNIT
    assert apply_semantical_restriction((TermDecl("a"),), TVar("a")) is None


def test_dependent_application_to_a_non_value(plus_module):
    el = plus_module
    u = parse_in_scope(el, "plus S[Z[]] Z[]")
    d = Checker(el.types).check_term(el.ctx, App(Var("f"), u), F.sugar_equation(u, u))
    assert MACRO_PI_E in d.rules()
    assert validate(d, el.types)
    assert validate(expand_macros(d), el.types, primitive_only=True)
    assert not validate(strip_certificates(d), el.types)


def test_validator_rejects_a_freshness_violation():
    ctx = (PredDecl("Y", 0),)
    d = Checker().check_value(ctx, ID, POLY_ID)
    assert validate(d)
    side = dict(d.side, var="Y")
    prem = d.premises[0]
    bad_prem = Derivation(prem.rule, Judgement(prem.kind, ctx + (PredDecl("Y", 0),), prem.subject,
                                               F.formula_subst(prem.formula, F.PredVar(side["var"], 0), F.PredicateDef((), PredApp("Y")))),
                          prem.premises, prem.side)
    forged = Derivation(d.rule, d.conclusion, (bad_prem,), side)
    assert not validate(forged)


def test_validator_rejects_a_forged_certificate():
    ctx = (TermDecl("a"), TermDecl("b"), EquivHyp(TVar("a"), TVar("b")))
    d = Checker().check_term(ctx, S.Scissors(), F.sugar_equation(TVar("b"), TVar("a")))
    assert validate(d)
    # replay the same derivation in a context lacking the equation
    def drop(n):
        c = n.conclusion
        return Derivation(n.rule, Judgement(c.kind, tuple(e for e in c.ctx if not isinstance(e, EquivHyp) or e.lhs != TVar("a")),
                                            c.subject, c.formula), tuple(drop(p) for p in n.premises), n.side)
    assert validation_error(drop(d)) is not None


def test_derivation_export():
    d = Checker().check_value((), ID, POLY_ID)
    js = derivation_json(d)
    assert js["rule"] == PALL_I and js["premises"]
    json.dumps(js, ensure_ascii=False)
    assert derivation_text(d).splitlines()[0].startswith(PALL_I)


def test_mu_and_restart():
    # μα (x ∗ α) : A given x : A
    A = Named("nat")
    ctx = (LambdaHyp("x", A),)
    t = S.Mu("α", S.Process(Var("x"), S.SVar("α")))
    d = Checker(F.TypeTable({"nat": parse_formula("[Z : {} | S : nat]", types={"nat"})})).check_term(ctx, t, A)
    assert d.rules()[:2] == ["μ", "∗"]


@settings(max_examples=25)
@given(st.sampled_from([F.TOP, Named("nat"), F.sugar_equation(TVar("q"), TVar("q"))]),
       st.integers(0, 2))
def test_weakening_keeps_success(hyp, pos):
    el = elaborate(PLUS)
    ctx = el.ctx
    extra = (TermDecl("q"), LambdaHyp("unused", hyp))
    pos = min(pos, len(ctx))
    u = parse_in_scope(el, "plus Z[] Z[]")
    goal = F.sugar_equation(u, u)
    ch = Checker(el.types)
    d1 = ch.check_term(ctx, App(Var("f"), u), goal)
    d2 = ch.check_term(ctx[:pos] + extra + ctx[pos:], App(Var("f"), u), goal)
    assert validate(d1, el.types) and validate(d2, el.types)


NAT_BOOL = "type nat = Z[] | S[nat]\ntype bool = T[] | F[]\n"


@pytest.mark.parametrize("src,ty", [
    ("(fun x → S[x]) Z[]", "nat"),                       # argument widened to a declared type
    ("{fst = Z[]; snd = F[]}.fst", "nat"),                # projection from a literal, checked
    ("match S[Z[]] with | Z[] → Z[] | S[k] → k", "nat"),  # scrutinee widened to a declared type
])
def test_precise_synthesized_types_are_widened(src, ty):
    el = elaborate(NAT_BOOL)
    t = parse_in_scope(el, src)
    d = Checker(el.types).check_term((), t, Named(ty))
    assert validate(d, el.types)


def test_widening_does_not_invent_types():
    el = elaborate(NAT_BOOL)
    with pytest.raises(CheckFailure):
        Checker(el.types).check_term((), parse_in_scope(el, "(fun x → S[x]) T[]"), Named("bool"))
