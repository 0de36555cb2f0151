"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the summary lines.
"""

import io
import json
import random
import time

import pytest

from svr import formulas as F
from svr import syntax as S
from svr.checker import MACRO_PI_E, CheckFailure, Checker, expand_macros, strip_certificates, validate
from svr.cli import main
from svr.driver import ASSUMES_TOTALITY, elaborate, parse_in_scope
from svr.equivalence import (
    Budget, Proved, Refuted, SearchOracle, context_contradictory, decide, search_inequivalence,
)
from svr.formulas import Claim, EquivHyp, InequivHyp, TermDecl, restrict_to_equational
from svr.machine import (
    Blocked, Converged, Next, OutOfFuel, run, step,
)
from svr.syntax import (
    UNIT, App, Case, Ctor, Delta, Frame, Lam, Mu, Process, Proj, Push, Record, SVar, Scissors,
    TVar, Unit, Var,
)

import gen
from conftest import DATA

alpha, beta = SVar("α"), SVar("β")
ID = Lam("x", Var("x"))


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line past pytest's capture, then assert."""
    def report(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return report


# -- 1. intro programs -------------------------------------------------------

def test_intro_programs(verdict):
    path = DATA / "intro.svr"
    t0 = time.perf_counter()
    buf = io.StringIO()
    code = main(["check", str(path), "--json", "--emit-derivations"], out=buf)
    report = json.loads(buf.getvalue())
    el = elaborate(path.read_text())
    seconds = time.perf_counter() - t0
    items = {i.name: i for i in el.items}
    derivations_ok = all(validate(items[n].derivation, el.types) for n in ("addZeroN", "addNZero"))
    statuses = {i["name"]: i["status"] for i in report["items"]}
    rec_flagged = statuses["add"] == ASSUMES_TOTALITY and statuses["addNZero"] == ASSUMES_TOTALITY
    emitted = all(i.get("derivation") for i in report["items"] if i["name"] in ("addZeroN", "addNZero"))
    ok = code == 0 and derivations_ok and rec_flagged and emitted and seconds < 5
    verdict(1, "intro listings check", ok, f"exit {code}, statuses {statuses}, {seconds:.2f}s")


# -- 2. machine conformance --------------------------------------------------

C0, D0 = Ctor("C", UNIT), Ctor("D", UNIT)
R = Record((("l", C0),))


class _Fires:
    def inequivalent(self, v, w):
        return True


GOLDEN = [
    # rule, before, after
    ("app", Process(App(ID, C0), alpha), Process(C0, Frame(ID, alpha))),
    ("mu", Process(Mu("β", Process(C0, beta)), alpha), Process(Process(C0, alpha), alpha)),
    ("restart", Process(Process(C0, beta), alpha), Process(C0, beta)),
    ("frame", Process(C0, Frame(ID, alpha)), Process(ID, Push(C0, alpha))),
    ("beta", Process(ID, Push(C0, alpha)), Process(C0, alpha)),
    ("proj", Process(Proj(R, "l"), alpha), Process(C0, alpha)),
    ("case", Process(Case(C0, (("C", "y", Ctor("D", Var("y"))),)), alpha), Process(Ctor("D", UNIT), alpha)),
    ("delta", Process(Delta(C0, D0), alpha), Process(C0, alpha)),
    ("unit", Process(Unit(UNIT), alpha), Process(UNIT, alpha)),
]


def expected_class(p):
    """Independent description of what the machine must do with `p`: the
    name of the rule that fires, or the blocked class it falls into."""
    t, pi = p.term, p.stack
    is_var = lambda v: type(v) is Var
    if type(t) is App:
        return "app"
    if type(t) is Mu:
        return "mu"
    if type(t) is Process:
        return "restart"
    if type(t) is Scissors:
        return "ScissorsHit"
    if type(t) is TVar:
        return "OpenTermVar"
    if type(t) is Delta:
        return "DeltaLike"  # the null oracle never fires
    if type(t) in (Var, Lam, Ctor, Record):
        if type(pi) is SVar:
            return "Final"
        if type(pi) is Frame:
            return "frame"
        if type(t) is Lam:
            return "beta"
        return "OpenLambdaVar" if is_var(t) else "Stuck"
    v = t.value
    if type(v) is Scissors:
        return "ScissorsHit"
    if is_var(v):
        return "OpenLambdaVar"
    if type(t) is Proj:
        return "proj" if type(v) is Record and t.label in v.labels else "Stuck"
    if type(t) is Case:
        return "case" if type(v) is Ctor and v.name in [c for c, _, _ in t.branches] else "Stuck"
    return "unit" if v == UNIT else "Stuck"


def test_machine_conformance(verdict):
    t0 = time.perf_counter()
    golden_bad = []
    for rule, before, after in GOLDEN:
        r = step(before, _Fires()) if rule == "delta" else step(before)
        if not (isinstance(r, Next) and r.rule == rule and S.alpha_eq(r.process, after)):
            golden_bad.append(rule)
    mismatches, unclassified, total = [], 0, 0
    for p in gen.processes(6):
        total += 1
        try:
            r = step(p)
        except Exception:
            unclassified += 1
            continue
        got = r.rule if isinstance(r, Next) else type(r.cls).__name__
        if isinstance(r, Blocked) and r.cls is None:
            unclassified += 1
        if got != expected_class(p):
            mismatches.append((S.pretty(p), got, expected_class(p)))
    seconds = time.perf_counter() - t0
    ok = not golden_bad and not mismatches and unclassified == 0 and total > 10_000 and seconds < 60
    verdict(2, "machine rules and blocked classification", ok,
            f"{len(GOLDEN)} golden steps, {total} processes, {len(mismatches)} mismatches, "
            f"{unclassified} unclassified, bad golden {golden_bad}, {seconds:.1f}s")


# -- 3. step commutes with substitution --------------------------------------

def _delta_free(t):
    return not any(isinstance(s, Delta) for s in S.subterms(t))


def test_step_commutes_with_substitution(verdict):
    rng = random.Random(20261019)
    pool = [p for p in gen.processes(7) if _delta_free(p) and isinstance(step(p), Next)]
    closed = [v for n in (1, 2, 3) for v in gen.values(n) if not any(S.free_vars(v))]
    stacks = [pi for n in (1, 3) for pi in gen.stacks(n) if _delta_free(pi)]
    terms = [t for n in (1, 2) for t in gen.terms(n) if _delta_free(t)]
    processes, pairs, failures = 0, 0, []
    for p in rng.sample(pool, 1000):
        processes += 1
        r = step(p)
        for _ in range(3):
            x, a, al = rng.choice(gen.LVARS), rng.choice(gen.TVARS), rng.choice(gen.SVARS)
            v, u, pi = rng.choice(closed), rng.choice(terms), rng.choice(stacks)

            def sigma(q):
                return S.subst(S.subst(S.subst(q, Var(x), v), TVar(a), u), SVar(al), pi)

            pairs += 1
            r2 = step(sigma(p))
            if not (isinstance(r2, Next) and r2.rule == r.rule and S.alpha_eq(r2.process, sigma(r.process))):
                failures.append(S.pretty(p))
    ok = processes == 1000 and not failures
    verdict(3, "step commutes with substitution", ok,
            f"{processes} processes, {pairs} substitution instances, {len(failures)} failures")


# -- 4. axiom suite ----------------------------------------------------------

def _calculus_only(t):
    """No ✂: it is a proof-level value that halts every probe alike."""
    return not any(isinstance(s, Scissors) for s in S.subterms(t))


def _closed_values(max_size):
    return [v for n in range(1, max_size + 1) for v in gen.values(n)
            if not any(S.free_vars(v)) and _calculus_only(v)]


def _bodies(max_size):
    """Terms whose only free variable is the λ-variable x."""
    out = []
    for n in range(1, max_size + 1):
        for t in gen.terms(n):
            fv = S.free_vars(t)
            if fv.lam <= {"x"} and not fv.term and not fv.mu and _delta_free(t) and _calculus_only(t):
                out.append(t)
    return out


def axiom_instances(rng):
    vals, bodies = _closed_values(3), _bodies(3)
    out = []
    for _ in range(200):
        t, v = rng.choice(bodies), rng.choice(vals)
        out.append(("beta", App(Lam("x", t), v), S.subst(t, Var("x"), v)))
    for _ in range(200):
        fields = {l: rng.choice(vals) for l in rng.sample(gen.LABELS, rng.randint(1, 2))}
        l = rng.choice(sorted(fields))
        out.append(("proj", Proj(Record(tuple(sorted(fields.items()))), l), fields[l]))
    for _ in range(200):
        c, v = rng.choice(gen.CTORS), rng.choice(vals)
        branches = {c: rng.choice(bodies)}
        for d in gen.CTORS:
            if d != c and rng.random() < 0.5:
                branches[d] = rng.choice(bodies)
        case = Case(Ctor(c, v), tuple((d, "x", b) for d, b in sorted(branches.items())))
        out.append(("case", case, S.subst(branches[c], Var("x"), v)))
    return out


def clash_pairs(rng):
    vals = _closed_values(3)
    lams = [v for v in vals if isinstance(v, Lam)]
    data = [v for v in vals if isinstance(v, (Ctor, Record))]
    out = []
    for _ in range(80):
        out.append(("constructor", Ctor("C", rng.choice(vals)), Ctor("D", rng.choice(vals))))
    for _ in range(80):
        ls, ms = rng.sample([(), ("l",), ("m",), ("l", "m")], 2)
        mk = lambda labels: Record(tuple((l, rng.choice(vals)) for l in labels))
        out.append(("field set", mk(ls), mk(ms)))
    for _ in range(80):
        pair = (rng.choice(lams), rng.choice(data + [UNIT]))
        out.append(("lambda/data", *(pair if rng.random() < 0.5 else pair[::-1])))
    return out


def test_axiom_suite(verdict):
    rng = random.Random(4)
    axioms = axiom_instances(rng)
    unproved = [(k, S.pretty(l)) for k, l, r in axioms if not isinstance(decide([], l, r), Proved)]
    clashes = clash_pairs(rng)
    unrefuted = [(k, S.pretty(l), S.pretty(r)) for k, l, r in clashes if not isinstance(decide([], l, r), Refuted)]
    shallow = Budget(fuel=10_000, depth=3)
    deep = Budget(fuel=10_000, depth=4)
    confirmed, rest = 0, []
    for _, l, r in clashes:
        w = search_inequivalence(l, r, shallow)
        if w is not None and w.sound:
            confirmed += 1
        else:
            rest.append((l, r))
    rest_unconfirmed = [(S.pretty(l), S.pretty(r)) for l, r in rest
                        if not ((w := search_inequivalence(l, r, deep)) is not None and w.sound)]
    rate = confirmed / len(clashes)
    ok = (len(axioms) >= 500 and not unproved and len(clashes) >= 200 and not unrefuted
          and rate >= 0.95 and not rest_unconfirmed)
    verdict(4, "axiom instances and clash refutations", ok,
            f"{len(axioms) - len(unproved)}/{len(axioms)} axioms proved, "
            f"{len(clashes) - len(unrefuted)}/{len(clashes)} clashes refuted, "
            f"{rate:.1%} confirmed at depth 3, {len(rest) - len(rest_unconfirmed)}/{len(rest)} more at depth 4"
            + (f"; unproved {unproved[:3]}" if unproved else "")
            + (f"; unrefuted {unrefuted[:3]}" if unrefuted else ""))


# -- 5. oracle agreement -----------------------------------------------------

def _closed_terms(max_size):
    return [t for n in range(1, max_size + 1) for t in gen.terms(n)
            if not any(S.free_vars(t)) and _delta_free(t) and _calculus_only(t)]


def _probe_stacks(depth):
    """Every stack of at most `depth` probe layers over the alphabet."""
    omega = S.omega()
    frames = [Lam("z", Case(Var("z"), tuple((d, "y", Var("y") if d == c else omega) for d in gen.CTORS)))
              for c in gen.CTORS]
    frames += [Lam("z", Proj(Var("z"), l)) for l in gen.LABELS] + [Lam("z", Unit(Var("z")))]
    pushes = _closed_values(2)
    layers = [("frame", f) for f in frames] + [("push", v) for v in pushes]
    level = [alpha]
    out = list(level)
    for _ in range(depth):
        level = [Frame(f, pi) if k == "frame" else Push(f, pi) for pi in level for k, f in layers]
        out += level
    return out


def co_converge_everywhere(t, u, stacks, fuel=2_000):
    """True when every probe gives both sides the same conclusive outcome
    (both converge or both halt); False as soon as one separates them or
    runs out of fuel."""
    for pi in stacks:
        o1, o2 = run(Process(t, pi), fuel), run(Process(u, pi), fuel)
        if isinstance(o1, OutOfFuel) or isinstance(o2, OutOfFuel):
            return False
        if isinstance(o1, Converged) != isinstance(o2, Converged):
            return False
    return True


def term_pairs(rng, n):
    terms = _closed_terms(5)
    pairs = []
    for i in range(n):
        t = rng.choice(terms)
        kind = i % 3
        if kind == 0:
            u = rng.choice(terms)
        elif kind == 1:
            u = App(Lam("w", Var("w")), t) if S.is_value(t) else rng.choice(terms)
        else:
            u = S.subst(t, SVar("α"), SVar("α")) if rng.random() < 0.5 else Mu("γ", Process(t, SVar("γ")))
        pairs.append((t, u))
    return pairs


def test_oracle_agreement(verdict):
    rng = random.Random(5)
    pairs = term_pairs(rng, 1000)
    stacks = _probe_stacks(2)
    budget = Budget(fuel=10_000, depth=3)
    counts = {"proved": 0, "refuted": 0, "unknown": 0}
    proved_but_separated, refuted_but_agree = [], []
    for t, u in pairs:
        v = decide([], t, u, True, budget)
        if isinstance(v, Proved):
            counts["proved"] += 1
            w = search_inequivalence(t, u, budget)
            if w is not None and w.sound:
                proved_but_separated.append((S.pretty(t), S.pretty(u)))
        elif isinstance(v, Refuted):
            counts["refuted"] += 1
            if co_converge_everywhere(t, u, stacks):
                refuted_but_agree.append((S.pretty(t), S.pretty(u)))
        else:
            counts["unknown"] += 1
    ok = len(pairs) == 1000 and not proved_but_separated and not refuted_but_agree
    verdict(5, "decision procedure agrees with probing", ok,
            f"{len(pairs)} pairs {counts}, {len(proved_but_separated)} proved-but-separated, "
            f"{len(refuted_but_agree)} refuted-but-co-converging"
            + (f"; e.g. {(proved_but_separated + refuted_but_agree)[:3]}" if not ok else ""))


# -- 6. dependent application macro is admissible ----------------------------

PLUS = """type nat = Z[] | S[nat]
let rec plus (n : nat) (m : nat) : nat = match n with | Z[] → m | S[nn] → S[plus nn m]
val f : Πn:nat (n ≡ n)
val g : Πn:nat (plus n Z[] ≡ n)
"""


def numeral(k):
    return "Z[]" if k == 0 else f"S[{numeral(k - 1)}]"


def pi_elim_arguments():
    args = [f"plus {numeral(i)} {numeral(j)}" for i in range(6) for j in range(6)]
    args += [f"(fun x → S[x]) {numeral(k)}" for k in range(7)]
    args += [f"let y = {numeral(k)} in plus y y" for k in range(7)]
    return args


def test_pi_elim_admissibility(verdict):
    el = elaborate(PLUS)
    assert el.ok, el.diagnostics
    instances, failures = 0, []
    for i, text in enumerate(pi_elim_arguments()):
        u = parse_in_scope(el, text)
        fn = "f" if i % 2 == 0 else "g"
        hyp = F.lookup_lambda(el.ctx, fn)
        var, _, body = F.as_pi(hyp)
        goal = F.formula_subst(body, TVar(var), u)
        instances += 1
        try:
            d = Checker(el.types).check_term(el.ctx, App(Var(fn), u), goal)
        except CheckFailure as e:
            failures.append((text, f"check: {e}"))
            continue
        if MACRO_PI_E not in d.rules():
            failures.append((text, "macro not used"))
        elif not validate(expand_macros(d), el.types, primitive_only=True):
            failures.append((text, "expansion rejected"))
        elif validate(strip_certificates(d), el.types):
            failures.append((text, "stripped derivation accepted"))
    ok = instances >= 50 and not failures
    verdict(6, "dependent application expands to primitive rules", ok,
            f"{instances - len(failures)}/{instances} instances" + (f"; {failures[:3]}" if failures else ""))


# -- 7. safety desk-check ----------------------------------------------------

SAFETY_TYPES = """type nat = Z[] | S[nat]
type bool = T[] | F[]
type pair = {fst : nat; snd : bool}
"""


class ProgramGen:
    """Random closed programs of a given first-order type, written in the
    surface language.  `env` maps bound names to their types."""

    def __init__(self, rng):
        self.rng = rng
        self.count = 0

    def name(self):
        self.count += 1
        return f"v{self.count}"

    def expr(self, ty, depth, env):
        rng = self.rng
        local = [x for x, t in env if t == ty]
        if depth == 0 or rng.random() < 0.2:
            if local and rng.random() < 0.5:
                return rng.choice(local)
            return self.leaf(ty, env)
        pick = rng.randrange(6)
        if pick == 0:
            x = self.name()
            xty = rng.choice(["nat", "bool", "pair"])
            return f"(let {x} = {self.expr(xty, depth - 1, env)} in {self.expr(ty, depth - 1, env + [(x, xty)])})"
        if pick == 1:
            x = self.name()
            xty = rng.choice(["nat", "bool"])
            return f"((fun {x} → {self.expr(ty, depth - 1, env + [(x, xty)])}) {self.expr(xty, depth - 1, env)})"
        if pick == 2:
            k = self.name()
            return (f"(match {self.expr('nat', depth - 1, env)} with | Z[] → {self.expr(ty, depth - 1, env)}"
                    f" | S[{k}] → {self.expr(ty, depth - 1, env + [(k, 'nat')])})")
        if pick == 3:
            return (f"(match {self.expr('bool', depth - 1, env)} with | T[] → {self.expr(ty, depth - 1, env)}"
                    f" | F[] → {self.expr(ty, depth - 1, env)})")
        if pick == 4 and ty in ("nat", "bool"):
            label = "fst" if ty == "nat" else "snd"
            return f"{self.expr('pair', depth - 1, env)}.{label}"
        return self.shape(ty, depth, env)

    def shape(self, ty, depth, env):
        if ty == "nat":
            return f"S[{self.expr('nat', depth - 1, env)}]" if self.rng.random() < 0.6 else "Z[]"
        if ty == "bool":
            return self.rng.choice(["T[]", "F[]"])
        return f"{{fst = {self.expr('nat', depth - 1, env)}; snd = {self.expr('bool', depth - 1, env)}}}"

    def leaf(self, ty, env):
        if ty == "nat":
            return numeral(self.rng.randrange(3))
        if ty == "bool":
            return self.rng.choice(["T[]", "F[]"])
        return f"{{fst = {self.leaf('nat', env)}; snd = {self.leaf('bool', env)}}}"


def safety_corpus(rng, n):
    g = ProgramGen(rng)
    return [(ty, g.expr(ty, 4, [])) for ty in (rng.choice(["nat", "bool", "pair"]) for _ in range(n))]


def test_safety_desk_check(verdict):
    rng = random.Random(7)
    corpus = safety_corpus(rng, 120)
    typed, safe, problems = 0, 0, []
    for ty, text in corpus:
        el = elaborate(SAFETY_TYPES + f"let main : {ty} = {text}\n")
        if not el.ok:
            problems.append((text, "rejected", [d.message for d in el.diagnostics] + [i.message for i in el.items if i.status != "ok"]))
            continue
        A = F.Named(ty)
        assert F.is_pure(A, el.types) and F.is_first_order(A, el.types)
        typed += 1
        term = S.erase_hints(el.globals["main"].body)
        out = run(Process(term, alpha), 100_000)
        if not isinstance(out, Converged):
            problems.append((text, "did not converge", out))
            continue
        try:
            d = Checker(el.types).check_term((), out.value, A)
        except CheckFailure as e:
            problems.append((text, "result rejected", str(e)))
            continue
        if validate(d, el.types):
            safe += 1
        else:
            problems.append((text, "result derivation invalid", None))
    ok = typed >= 100 and safe == typed and not problems
    verdict(7, "well-typed closed programs run to well-typed values", ok,
            f"{safe}/{typed} safe of {len(corpus)} generated" + (f"; {problems[:2]}" if problems else ""))


# -- 8. consistency probes ---------------------------------------------------

NAT = "type nat = Z[] | S[nat]\n"

PSEUDO_PROOFS = {
    "scissors in the empty context": "let p : ⊥ = ✂",
    "identity as falsity": "let p : ⊥ = fun x → x",
    "empty record at every type": "let p : ∀X X = {}",
    "constructor clash by scissors": NAT + "let p : (Z[] ≡ S[Z[]]) = ✂",
    "false equation on a parameter": NAT + "let p (n : nat) : (n ≡ Z[]) = ✂",
    "successor equals zero": NAT + "let p (n : nat) : (S[n] ≡ Z[]) = ✂",
    "consistent hypothesis refuted by scissors": NAT + "let p (n : nat) : ((n ≡ Z[]) ⇒ ⊥) = fun e → ✂",
    "control operator returning a record": "let p : ⊥ = mu a → {} ∗ a",
    "scissors under a consistent branch": NAT + "let p : ⊥ = match Z[] with | Z[] → ✂ | S[k] → ✂",
    "hypothesis of the wrong type": "let p (x : {}) : ⊥ = x",
    "refutation of every proposition": "let p : ∀X (X ⇒ ⊥) = fun x → x",
    "scissors passed as an argument": "let p : ⊥ = (fun x → x) ✂",
    "dependent application to a non-value": NAT + (
        "val h : nat ⇒ nat\n"
        "val f : Πn:nat ((h n ≡ Z[]) ⇒ ⊥)\n"
        "let p : ⊥ = f (h Z[]) ✂"
    ),
    "dependent application to a non-value, no witness": NAT + (
        "val h : nat ⇒ nat\n"
        "val f : Πn:nat (n ≡ Z[])\n"
        "let p : (h Z[] ≡ Z[]) = f (h Z[])"
    ),
}


def scissors_contexts(rng, n):
    vals = [v for v in _closed_values(3) if not isinstance(v, Lam)][:40] + [ID]
    atoms = vals + [TVar("a"), TVar("b")]
    out = []
    for _ in range(n):
        ctx = [TermDecl("a"), TermDecl("b")]
        for _ in range(rng.randint(0, 3)):
            lhs, rhs = rng.choice(atoms), rng.choice(atoms)
            ctx.append(EquivHyp(lhs, rhs) if rng.random() < 0.6 else InequivHyp(lhs, rhs))
        out.append(tuple(ctx))
    return out


def test_consistency_probes(verdict):
    accepted = []
    for title, src in PSEUDO_PROOFS.items():
        el = elaborate(src)
        item = next((i for i in el.items if i.name == "p"), None)
        assert not el.diagnostics and item is not None, title  # a parse error proves nothing
        if item.status != "failed":
            accepted.append(title)
    rng = random.Random(8)
    contexts = scissors_contexts(rng, 300)
    mismatched, contradictory = [], 0
    for ctx in contexts:
        expected = isinstance(context_contradictory(restrict_to_equational(ctx)), Proved)
        contradictory += expected
        try:
            d = Checker().check_term(ctx, Scissors(), F.BOT)
            got = validate(d)
        except CheckFailure:
            got = False
        if got != expected:
            mismatched.append(F.pretty_context(ctx))
    ok = len(PSEUDO_PROOFS) >= 10 and not accepted and not mismatched and 0 < contradictory < len(contexts)
    verdict(8, "pseudo-proofs of falsity are rejected", ok,
            f"{len(PSEUDO_PROOFS) - len(accepted)}/{len(PSEUDO_PROOFS)} rejected, "
            f"✂ matched contradiction on {len(contexts) - len(mismatched)}/{len(contexts)} contexts "
            f"({contradictory} contradictory)" + (f"; accepted {accepted}" if accepted else "")
            + (f"; mismatched {mismatched[:3]}" if mismatched else ""))
