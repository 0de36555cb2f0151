from hypothesis import given, settings

from svr import syntax as S
from svr.equivalence import (
    Budget, Proved, Refuted, Unknown, context_contradictory, decide, normalize,
    replay, search_inequivalence, verdict_json, SearchOracle,
)
from svr.formulas import Claim
from svr.machine import Process, run
from svr.syntax import UNIT, App, Case, Ctor, Frame, Lam, Proj, Record, SVar, TVar, Unit, Var

import gen

ID = Lam("x", Var("x"))
C, D = Ctor("C", UNIT), Ctor("D", UNIT)
a, b = TVar("a"), TVar("b")
SMALL = Budget(fuel=100, depth=3)


def test_normalize_axioms():
    assert normalize(App(ID, UNIT)) == UNIT
    assert normalize(Proj(Record((("l", C),)), "l")) == C
    c1 = Case(Ctor("C1", UNIT), (("C1", "x", Var("x")), ("C2", "x", S.omega())))
    assert normalize(c1) == UNIT


def test_normalize_under_binders_and_keeps_non_values():
    assert normalize(Lam("y", App(ID, Var("y")))) == Lam("y", Var("y"))
    # the argument is not a value: no β
    t = App(ID, App(a, a))
    assert normalize(t) == t


def test_normalize_logs_rewrites():
    log = []
    normalize(App(ID, UNIT), log=log)
    assert log and log[0]["axiom"] == "beta" and log[0]["after"] == "{}"


def test_decide_examples():
    assert isinstance(decide([], App(ID, UNIT), UNIT), Proved)
    assert isinstance(decide([], C, D), Refuted)
    E = [Claim(a, Ctor("S", b)), Claim(b, Ctor("Z", UNIT))]
    assert isinstance(decide(E, a, Ctor("S", Ctor("Z", UNIT))), Proved)
    assert isinstance(decide([], ID, UNIT), Refuted)
    assert isinstance(decide([], a, b), Unknown)


def test_decide_polarity():
    assert isinstance(decide([], C, D, polarity=False), Proved)
    assert isinstance(decide([], UNIT, UNIT, polarity=False), Refuted)


def test_clash_kinds():
    kinds = {
        "constructor": (C, D),
        "record": (Record((("l", UNIT),)), UNIT),
        "lambda/constructor": (ID, C),
        "lambda/record": (ID, UNIT),
        "constructor/record": (C, UNIT),
    }
    for name, (l, r) in kinds.items():
        v = decide([], l, r)
        assert isinstance(v, Refuted), name
        assert v.certificate["clash"]["kind"]


def test_context_contradictory_examples():
    assert isinstance(context_contradictory([Claim(C, D)]), Proved)
    assert isinstance(context_contradictory([Claim(a, b), Claim(a, b, False)]), Proved)
    assert isinstance(context_contradictory([]), Unknown)


def test_certificates_replay_and_forgeries_fail():
    v = decide([], App(ID, UNIT), UNIT)
    assert replay(v.certificate, [], App(ID, UNIT), UNIT, True)
    forged = dict(v.certificate, goal=str(Claim(C, D)))
    assert not replay(forged, [], C, D, True)
    assert not replay({}, [], App(ID, UNIT), UNIT, True)
    assert verdict_json(v)["verdict"] == "proved"


def test_search_separates_constructors_with_a_case_probe():
    w = search_inequivalence(C, D, SMALL)
    assert w is not None and w.sound
    assert isinstance(w.stack, Frame)
    probe = w.stack.fn
    assert isinstance(probe, Lam) and isinstance(probe.body, Case)
    assert S.pretty(w.stack).startswith("[λx case x {C[y] → y | D[y] →")


def test_search_separates_lambda_from_empty_record_with_the_unit_probe():
    w = search_inequivalence(ID, UNIT, SMALL)
    assert w is not None and w.sound
    assert w.stack == Frame(Lam("x", Unit(Var("x"))), SVar("α"))


def test_search_finds_nothing_for_beta_instance():
    assert search_inequivalence(App(ID, UNIT), UNIT, Budget(fuel=100, depth=3)) is None


def test_witness_json_has_traces():
    js = search_inequivalence(C, D, SMALL).to_json()
    assert js["status"] == "sound" and js["lhs_trace"] and js["rhs_trace"]


def test_search_oracle_is_stratified():
    assert not SearchOracle(SMALL, 0).inequivalent(C, D)
    assert SearchOracle(SMALL, 1).inequivalent(C, D)
    assert not SearchOracle(SMALL, 1).inequivalent(C, C)


def test_budget_rejects_negative_components():
    try:
        Budget(depth=-1)
    except ValueError:
        return
    raise AssertionError


@settings(max_examples=60)
@given(gen.term_st(3, delta=False))
def test_normalize_is_provably_equivalent(t):
    n = normalize(t, 200)
    if n != t:
        assert isinstance(decide([], t, n, True, Budget(fuel=500)), Proved)


@settings(max_examples=40)
@given(gen.closed_value_st(2), gen.closed_value_st(2))
def test_refuted_closed_values_are_separated_by_search(v, w):
    if isinstance(decide([], v, w, True, SMALL), Refuted):
        wit = search_inequivalence(v, w, Budget(fuel=200, depth=3))
        assert wit is not None and wit.sound


@settings(max_examples=40)
@given(gen.term_st(2, delta=False))
def test_congruence_is_not_contradicted_in_contexts(t):
    """If v ≡ w is proved, wrapping both in a one-hole context never refutes."""
    v, w = App(ID, UNIT), UNIT
    for hole in (lambda z: App(t, z), lambda z: Lam("q", App(z, t)), lambda z: Ctor("C", z)):
        l, r = hole(v), hole(w)
        if isinstance(l, S.Ctor) and not S.is_value(v):
            continue
        assert not isinstance(decide([], l, r, True, SMALL), Refuted)
