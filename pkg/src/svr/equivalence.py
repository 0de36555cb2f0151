"""Deciding observational equivalence, partially, two ways.

`decide` is a rewriting/congruence-closure procedure: it is sound but may
answer `Unknown`.  `search_inequivalence` looks for a stack and a closed
substitution on which one side converges and the other does not; it doubles
as the δ-oracle of the machine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

from . import syntax as S
from .formulas import Claim
from .machine import (
    Converged, DeltaLike, EquivOracle, Final, Halted, OutOfFuel, RunOutcome,
    Blocked, outcome_json, step, trace_rules, trace_json,
)
from .syntax import (
    UNIT, App, Case, Ctor, Delta, Frame, Lam, Mu, Process, Proj, Push, Record,
    SVar, Scissors, Stack, TVar, Term, Unit, Value, Var, alpha_key, free_vars,
    pretty, subst,
)


@dataclass(frozen=True)
class Budget:
    fuel: int = 10_000        # machine steps per probe run, and rewrite steps
    depth: int = 3            # stack-context layers in the search
    subst_size: int = 3       # size bound on values substituted for free variables
    delta_index: int = 2      # stratification bound for δ

    def __post_init__(self):
        for name in ("fuel", "depth", "subst_size", "delta_index"):
            if getattr(self, name) < 0:
                raise ValueError(f"budget {name} must be non-negative")


DEFAULT_BUDGET = Budget()

EquationalContext = Sequence[Claim]


# -- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class Proved:
    certificate: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Refuted:
    certificate: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


Verdict = Union[Proved, Refuted, Unknown]


def verdict_name(v: Verdict) -> str:
    return type(v).__name__.lower()


# -- normalisation -----------------------------------------------------------

_MAX_SIZE = 5_000


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n


def normalize(t: Term, fuel: int = 1_000, log: list | None = None) -> Term:
    """Rewrite with value-β, projection on record literals and case on
    constructor literals, innermost first, under binders too.

    If `log` is given, each contraction is appended as a dict with keys
    position/axiom/before/after."""
    box = _Fuel(fuel)
    return _norm(t, box, log, "ε")


def normalize_counted(t: Term, fuel: int) -> tuple[Term, bool]:
    """Like `normalize` but also report whether fuel ran out."""
    box = _Fuel(fuel)
    out = _norm(t, box, None, "ε")
    return out, box.left <= 0


def _norm(t, box: _Fuel, log, pos):
    if box.left <= 0:
        return t
    match t:
        case Var() | TVar() | SVar() | Scissors():
            return t
        case Lam(x, b):
            b2 = _norm(b, box, log, pos + ".0")
            return t if b2 is b else Lam(x, b2)
        case Mu(a, b):
            b2 = _norm(b, box, log, pos + ".0")
            return t if b2 is b else Mu(a, b2)
        case Ctor(c, v):
            v2 = _norm(v, box, log, pos + ".0")
            return t if v2 is v else Ctor(c, v2)
        case Record(fs):
            fs2 = tuple((l, _norm(v, box, log, f"{pos}.{l}")) for l, v in fs)
            return t if all(a[1] is b[1] for a, b in zip(fs, fs2)) else Record(fs2)
        case Delta(v, w):
            return Delta(_norm(v, box, log, pos + ".0"), _norm(w, box, log, pos + ".1"))
        case Unit(v):
            return Unit(_norm(v, box, log, pos + ".0"))
        case Process(u, pi):
            return Process(_norm(u, box, log, pos + ".0"), _norm(pi, box, log, pos + ".1"))
        case Push(v, pi):
            return Push(_norm(v, box, log, pos + ".0"), _norm(pi, box, log, pos + ".1"))
        case Frame(u, pi):
            return Frame(_norm(u, box, log, pos + ".0"), _norm(pi, box, log, pos + ".1"))
        case App(f, u):
            f2 = _norm(f, box, log, pos + ".0")
            u2 = _norm(u, box, log, pos + ".1")
            if isinstance(f2, Lam) and isinstance(u2, Value) and not isinstance(u2, Scissors):
                return _contract(App(f2, u2), subst(f2.body, Var(f2.var), u2), "beta", box, log, pos)
            return t if (f2 is f and u2 is u) else App(f2, u2)
        case Proj(v, l):
            v2 = _norm(v, box, log, pos + ".0")
            if isinstance(v2, Record) and v2.get(l) is not None:
                return _contract(Proj(v2, l), v2.get(l), "proj", box, log, pos)
            return t if v2 is v else Proj(v2, l)
        case Case(v, bs):
            v2 = _norm(v, box, log, pos + ".0")
            if isinstance(v2, Ctor) and t.branch(v2.name) is not None:
                x, body = t.branch(v2.name)
                return _contract(Case(v2, bs), subst(body, Var(x), v2.arg), "case", box, log, pos)
            bs2 = tuple((c, x, _norm(b, box, log, f"{pos}.{c}")) for c, x, b in bs)
            return Case(v2, bs2)
        case S.Annot(u, _) | S.Inst(u, _) | S.Rewrite(_, u):
            return _norm(u, box, log, pos)
    raise TypeError(f"not syntax: {t!r}")


def _contract(before, after, axiom, box, log, pos):
    box.left -= 1
    if log is not None:
        log.append({"position": pos, "axiom": axiom, "before": pretty(before), "after": pretty(after)})
    if S.size(after) > _MAX_SIZE:
        box.left = 0
        return after
    return _norm(after, box, log, pos)


def stuck_count(t) -> int:
    """Eliminations whose subject is not a literal: the places where
    evaluation of an open term would block."""
    n = 0
    for s in S.subterms(t):
        if isinstance(s, Case) and not isinstance(s.value, Ctor):
            n += 1
        elif isinstance(s, Proj) and not isinstance(s.value, Record):
            n += 1
    return n


# -- congruence closure engine -----------------------------------------------

def _children(t):
    """Binder-free children, each with a flag saying it is a value position."""
    match t:
        case Ctor(_, v) | Unit(v) | Proj(v, _):
            return ((v, True),)
        case Record(fs):
            return tuple((v, True) for _, v in fs)
        case App(f, u):
            return ((f, False), (u, False))
        case Delta(v, w):
            return ((v, True), (w, True))
        case Case(v, _):
            return ((v, True),)
    return ()


def _former(t):
    """Signature tag of a node apart from its children (None = atomic)."""
    match t:
        case Ctor(c, _):
            return ("ctor", c)
        case Record(fs):
            return ("rec", tuple(l for l, _ in fs))
        case App():
            return ("app",)
        case Delta():
            return ("delta",)
        case Unit():
            return ("unit",)
        case Proj(_, l):
            return ("proj", l)
        case Case(_, bs):
            return ("case", S._key(Case(UNIT, bs), {}, 0))
    return None


def _rank(t) -> tuple:
    if isinstance(t, (Ctor, Record, Lam)):
        cls = 0
    elif isinstance(t, Var):
        cls = 1
    elif isinstance(t, TVar):
        cls = 2
    elif isinstance(t, Scissors):
        cls = 3
    else:
        cls = 4
    return (cls, S.size(t), pretty(t))


def _fv_names(t) -> frozenset:
    fv = free_vars(t)
    return frozenset(("x", n) for n in fv.lam) | frozenset(("a", n) for n in fv.term) \
        | frozenset(("m", n) for n in fv.mu)


class Contradiction(Exception):
    def __init__(self, info: dict):
        super().__init__(info.get("kind"))
        self.info = info


class _Engine:
    """Union-find over alpha-classes of terms, closed under congruence,
    constructor/record injectivity and the rewriting axioms."""

    MAX_NODES = 3_000
    ROUNDS = 12

    def __init__(self, budget: Budget):
        self.budget = budget
        self.terms: dict = {}
        self.parent: dict = {}
        self.members: dict = {}
        self.log: list = []
        self.neq: list = []
        self.fuel = _Fuel(max(budget.fuel, 200))
        self._rep_cache: dict = {}
        self._sub_cache: dict = {}

    # union-find
    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def add(self, t) -> tuple:
        k = alpha_key(t)
        if k in self.terms:
            return k
        if len(self.terms) >= self.MAX_NODES:
            raise _Overflow()
        self.terms[k] = t
        self.parent[k] = k
        self.members[k] = [k]
        for c, _ in _children(t):
            self.add(c)
        self._rep_cache.clear()
        return k

    def union(self, k1, k2, why: dict) -> bool:
        r1, r2 = self.find(k1), self.find(k2)
        if r1 == r2:
            return False
        if len(self.members[r1]) < len(self.members[r2]):
            r1, r2 = r2, r1
        self.parent[r2] = r1
        self.members[r1].extend(self.members.pop(r2))
        self._rep_cache.clear()
        self.log.append({**why, "lhs": pretty(self.terms[k1]), "rhs": pretty(self.terms[k2])})
        return True

    def same(self, a, b) -> bool:
        return self.find(alpha_key(a)) == self.find(alpha_key(b))

    # representatives
    def _subkeys(self, k):
        s = self._sub_cache.get(k)
        if s is None:
            t = self.terms[k]
            s = frozenset(alpha_key(u) for u in S.subterms(t) if u is not t and isinstance(u, Term))
            self._sub_cache[k] = s
        return s

    def _acyclic_members(self, root):
        for m in self.members[root]:
            if not any(sk in self.parent and self.find(sk) == root for sk in self._subkeys(m)):
                yield m

    def rep(self, root, need_value: bool):
        ck = (root, need_value)
        if ck in self._rep_cache:
            return self._rep_cache[ck]
        best = None
        for m in self._acyclic_members(root):
            t = self.terms[m]
            if need_value and not isinstance(t, Value):
                continue
            if isinstance(t, Scissors):
                continue
            if best is None or _rank(t) < _rank(self.terms[best]):
                best = m
        self._rep_cache[ck] = best
        return best

    def definition(self, root):
        """A λ in the class that is not usable as representative (it mentions
        its own class): a recursive definition, unfolded on demand."""
        for m in self.members[root]:
            t = self.terms[m]
            if isinstance(t, Lam):
                return t
        return None

    # canonical forms
    def canon(self, t, bound=frozenset(), need_value=False, depth=0):
        if self.fuel.left <= 0 or depth > 60:
            return t
        t2 = self._canon_children(t, bound, depth)
        if bound and _fv_names(t2) & bound:
            return t2
        k = alpha_key(t2)
        if k in self.parent:
            root = self.find(k)
            r = self.rep(root, need_value or isinstance(t2, Value))
            if r is not None and r != k:
                rt = self.terms[r]
                if not (bound and _fv_names(rt) & bound):
                    self.fuel.left -= 1
                    return self.canon(rt, bound, need_value, depth + 1)
        if not need_value:
            u = self._unfold(t2, bound, depth)
            if u is not None:
                return u
        return t2

    def _canon_children(self, t, bound, depth):
        match t:
            case Lam(x, b):
                return Lam(x, self.canon(b, bound | {("x", x)}, False, depth))
            case Mu(a, b):
                return Mu(a, self.canon(b, bound | {("m", a)}, False, depth))
            case Case(v, bs):
                v2 = self.canon(v, bound, True, depth)
                bs2 = tuple((c, x, self.canon(b, bound | {("x", x)}, False, depth)) for c, x, b in bs)
                return Case(v2, bs2)
            case Ctor(c, v):
                return Ctor(c, self.canon(v, bound, True, depth))
            case Record(fs):
                return Record(tuple((l, self.canon(v, bound, True, depth)) for l, v in fs))
            case App(f, u):
                return App(self.canon(f, bound, False, depth), self.canon(u, bound, False, depth))
            case Proj(v, l):
                return Proj(self.canon(v, bound, True, depth), l)
            case Delta(v, w):
                return Delta(self.canon(v, bound, True, depth), self.canon(w, bound, True, depth))
            case Unit(v):
                return Unit(self.canon(v, bound, True, depth))
            case Process(u, pi):
                return Process(self.canon(u, bound, False, depth), self._canon_stack(pi, bound, depth))
        return t

    def _canon_stack(self, pi, bound, depth):
        match pi:
            case Push(v, rest):
                return Push(self.canon(v, bound, True, depth), self._canon_stack(rest, bound, depth))
            case Frame(u, rest):
                return Frame(self.canon(u, bound, False, depth), self._canon_stack(rest, bound, depth))
        return pi

    def _unfold(self, t, bound, depth):
        """Unfold a recursively defined head applied to arguments, when doing
        so does not leave more blocked eliminations than before."""
        if not isinstance(t, App):
            return None
        head, args = t, []
        while isinstance(head, App):
            args.append(head.arg)
            head = head.fn
        if not isinstance(head, (Var, TVar)):
            return None
        hk = alpha_key(head)
        if hk not in self.parent:
            return None
        d = self.definition(self.find(hk))
        if d is None or (bound and _fv_names(d) & bound):
            return None
        unfolded = S.app(d, *reversed(args))
        n, out = normalize_counted(unfolded, min(self.fuel.left, 2_000))
        self.fuel.left -= 1
        if out or stuck_count(n) > stuck_count(t):
            return None
        if any(isinstance(s, App) and alpha_key(s.fn) == alpha_key(d) for s in S.subterms(n)):
            return None
        self.log.append({"rule": "unfold", "lhs": pretty(t), "rhs": pretty(n)})
        return self.canon(n, bound, False, depth + 1)

    # closure
    def assume(self, c: Claim):
        a, b = self.add(c.lhs), self.add(c.rhs)
        if c.equiv:
            self.union(a, b, {"rule": "hyp"})
        else:
            self.neq.append((a, b))

    def close(self):
        for _ in range(self.ROUNDS):
            changed = self._rewrite_round()
            changed |= self._congruence()
            changed |= self._data_classes()
            self._check_neq()
            if not changed or self.fuel.left <= 0:
                return

    def _rewrite_round(self) -> bool:
        changed = False
        for k, t in list(self.terms.items()):
            if self.fuel.left <= 0:
                break
            c = self.canon(t)
            steps: list = []
            box = _Fuel(min(self.fuel.left, 2_000))
            n = _norm(c, box, steps, "ε")
            if box.left <= 0:
                n, steps = c, []
            self.fuel.left -= 1
            nk = alpha_key(n)
            if nk != k:
                self.add(n)
                why = {"rule": "rewrite", "via": pretty(c), "axioms": steps}
                changed |= self.union(k, nk, why)
        return changed

    def _congruence(self) -> bool:
        changed = True
        any_change = False
        while changed:
            changed = False
            sigs: dict = {}
            for k, t in list(self.terms.items()):
                f = _former(t)
                if f is None:
                    continue
                sig = (f,) + tuple(self.find(alpha_key(c)) for c, _ in _children(t))
                other = sigs.setdefault(sig, k)
                if other != k and self.union(other, k, {"rule": "congruence"}):
                    changed = any_change = True
        return any_change

    def _data_classes(self) -> bool:
        changed = False
        for root in list(self.members):
            if root not in self.members:
                continue
            ts = [self.terms[m] for m in self.members[root]]
            ctors = [t for t in ts if isinstance(t, Ctor)]
            recs = [t for t in ts if isinstance(t, Record)]
            lams = [t for t in ts if isinstance(t, Lam)]
            names = {c.name for c in ctors}
            if len(names) > 1:
                a, b = sorted(ctors, key=lambda c: c.name)[0], next(c for c in ctors if c.name != sorted(names)[0])
                self._clash("constructor", a, b)
            if ctors and recs:
                self._clash("constructor-record", ctors[0], recs[0])
            if lams and ctors:
                self._clash("lambda-constructor", lams[0], ctors[0])
            if lams and recs:
                self._clash("lambda-record", lams[0], recs[0])
            labels = {r.labels for r in recs}
            if len(labels) > 1:
                r1 = recs[0]
                r2 = next(r for r in recs if r.labels != r1.labels)
                self._clash("record-fields", r1, r2)
            for a, b in zip(ctors, ctors[1:]):
                changed |= self.union(self.add(a.arg), self.add(b.arg), {"rule": "injectivity"})
            for a, b in zip(recs, recs[1:]):
                for (l, v), (_, w) in zip(a.fields, b.fields):
                    changed |= self.union(self.add(v), self.add(w), {"rule": "injectivity"})
        return changed

    def _clash(self, kind, a, b):
        raise Contradiction({"kind": kind, "lhs": pretty(a), "rhs": pretty(b)})

    def _check_neq(self):
        for a, b in self.neq:
            if self.find(a) == self.find(b):
                raise Contradiction({"kind": "inequivalence", "lhs": pretty(self.terms[a]),
                                     "rhs": pretty(self.terms[b])})


class _Overflow(Exception):
    pass


def _run_engine(claims: Iterable[Claim], budget: Budget, extra: Iterable[Term] = ()):
    """Return (engine, contradiction-info-or-None, overflowed)."""
    eng = _Engine(budget)
    try:
        for c in claims:
            eng.assume(c)
        for t in extra:
            eng.add(t)
        eng.close()
    except Contradiction as e:
        return eng, e.info, False
    except _Overflow:
        return eng, None, True
    return eng, None, False


def _claims_json(E) -> list:
    return [str(c) for c in E]


def context_contradictory(E: EquationalContext, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    E = tuple(E)
    eng, info, _ = _run_engine(E, budget)
    if info is not None:
        return Proved({"context": _claims_json(E), "goal": "⊥", "clash": info, "steps": eng.log})
    return Unknown("no contradiction found")


def decide(E: EquationalContext, lhs: Term, rhs: Term, polarity: bool = True,
           budget: Budget = DEFAULT_BUDGET) -> Verdict:
    """polarity True asks `lhs ≡ rhs`, False asks `lhs ≢ rhs`."""
    E = tuple(E)
    lhs, rhs = S.erase_hints(lhs), S.erase_hints(rhs)
    goal = str(Claim(lhs, rhs, polarity))
    eq_claim = Claim(lhs, rhs, True)
    neq_claim = Claim(lhs, rhs, False)
    # does E ⊢ lhs ≡ rhs?  (E, lhs ≢ rhs ⊢ ⊥)
    eng, info, _ = _run_engine(E + (neq_claim,), budget)
    entails_eq = info is not None
    eq_cert = {"context": _claims_json(E), "goal": str(eq_claim), "clash": info, "steps": eng.log}
    # does E ⊢ lhs ≢ rhs?  (E, lhs ≡ rhs ⊢ ⊥)
    eng2, info2, _ = _run_engine(E + (eq_claim,), budget)
    entails_neq = info2 is not None
    neq_cert = {"context": _claims_json(E), "goal": str(neq_claim), "clash": info2, "steps": eng2.log}
    if polarity:
        if entails_eq:
            return Proved({**eq_cert, "goal": goal})
        if entails_neq:
            return Refuted(neq_cert)
    else:
        if entails_neq:
            return Proved({**neq_cert, "goal": goal})
        if entails_eq:
            return Refuted(eq_cert)
    return Unknown("neither the claim nor its negation follows")


def replay(certificate: dict, E: EquationalContext, lhs: Term, rhs: Term, polarity: bool,
           budget: Budget = DEFAULT_BUDGET) -> bool:
    """Check a Proved certificate by re-deriving it: it must name this goal
    and a contradiction, and the procedure must reproduce the contradiction."""
    if not certificate or not certificate.get("clash"):
        return False
    if certificate.get("goal") != str(Claim(S.erase_hints(lhs), S.erase_hints(rhs), polarity)):
        return False
    return isinstance(decide(E, lhs, rhs, polarity, budget), Proved)


def verdict_json(v: Verdict) -> dict:
    match v:
        case Proved(c):
            return {"verdict": "proved", "certificate": c}
        case Refuted(c):
            return {"verdict": "refuted", "certificate": c}
        case Unknown(r):
            return {"verdict": "unknown", "reason": r}
    raise TypeError(v)


# -- observational search ----------------------------------------------------

def _omega() -> Term:
    return S.omega()


@dataclass(frozen=True)
class Witness:
    stack: Stack
    substitution: tuple  # ((kind, name, Term), ...)
    lhs_outcome: RunOutcome
    rhs_outcome: RunOutcome
    sound: bool
    lhs: Term = None
    rhs: Term = None

    @property
    def status(self) -> str:
        return "sound" if self.sound else "suspected"

    def traces(self, fuel: int = 50):
        return (trace_rules(Process(self.lhs, self.stack), fuel),
                trace_rules(Process(self.rhs, self.stack), fuel))

    def to_json(self, trace_len: int = 50) -> dict:
        lt, rt = self.traces(trace_len)
        return {
            "status": self.status,
            "stack": pretty(self.stack),
            "substitution": [{"var": n, "kind": k, "value": pretty(v)} for k, n, v in self.substitution],
            "lhs": outcome_json(self.lhs_outcome),
            "rhs": outcome_json(self.rhs_outcome),
            "lhs_trace": trace_json(lt),
            "rhs_trace": trace_json(rt),
        }


def _alphabet(terms):
    ctors, labels = set(), set()
    for t in terms:
        for s in S.subterms(t):
            if isinstance(s, Ctor):
                ctors.add(s.name)
            elif isinstance(s, Case):
                ctors.update(c for c, _, _ in s.branches)
            elif isinstance(s, Record):
                labels.update(s.labels)
            elif isinstance(s, Proj):
                labels.add(s.label)
    for c in ("C", "D"):
        if len(ctors) >= 2:
            break
        ctors.add(c)
    if not labels:
        labels.add("l")
    return sorted(ctors), sorted(labels)


def _closed_values(ctors, labels, max_size):
    """Closed values of increasing size, deterministic order."""
    layer = [UNIT, Lam("x", Var("x"))]
    out = list(layer)
    seen = {alpha_key(v) for v in out}
    size = 1
    while size < max_size:
        size += 1
        new = []
        for v in out:
            if S.size(v) != size - 1:
                continue
            for c in ctors:
                new.append(Ctor(c, v))
            for l in labels:
                new.append(Record(((l, v),)))
        for v in new:
            k = alpha_key(v)
            if k not in seen:
                seen.add(k)
                out.append(v)
    return out


def _probe_layers(ctors, labels, values):
    """Stack layers, probes first: case probes, projection probes, the
    unit probe, then pushes of closed values."""
    x, y = "x", "y"
    layers = []
    for c in ctors:
        bs = tuple((d, y, Var(y) if d == c else _omega()) for d in ctors)
        layers.append(("frame", Lam(x, Case(Var(x), bs))))
    for l in labels:
        layers.append(("frame", Lam(x, Proj(Var(x), l))))
    layers.append(("frame", Lam(x, Unit(Var(x)))))
    for v in values:
        layers.append(("push", v))
    return layers


def _stacks(layers, depth, bottom="α"):
    for d in range(depth + 1):
        for combo in itertools.product(layers, repeat=d):
            pi: Stack = SVar(bottom)
            for kind, v in reversed(combo):
                pi = Frame(v, pi) if kind == "frame" else Push(v, pi)
            yield pi


def run_detecting_cycles(p: Process, fuel: int, oracle: EquivOracle) -> tuple[RunOutcome, bool]:
    """Run the machine; also report whether a state repeated (which proves
    divergence since the machine is deterministic)."""
    seen = set()
    steps = 0
    while True:
        r = step(p, oracle)
        if isinstance(r, Blocked):
            if isinstance(r.cls, Final):
                return Converged(r.cls.value, r.cls.stack_var, steps), False
            return Halted(r.cls, steps), False
        if steps == fuel:
            return OutOfFuel(p, steps), False
        if p in seen:
            return OutOfFuel(p, steps), True
        seen.add(p)
        p = r.process
        steps += 1


def _substitutions(t, u, values, budget):
    fv = free_vars(t) | free_vars(u)
    names = [("x", n) for n in sorted(fv.lam)] + [("a", n) for n in sorted(fv.term)]
    if not names:
        yield ()
        return
    pools = []
    for kind, _ in names:
        pool = [v for v in values if S.size(v) <= budget.subst_size]
        if kind == "a":
            pool = pool + [_omega()]
        pools.append(pool)
    for choice in itertools.product(*pools):
        yield tuple((k, n, v) for (k, n), v in zip(names, choice))


def _apply_subst(t, sub):
    lam = {n: v for k, n, v in sub if k == "x"}
    term = {n: v for k, n, v in sub if k == "a"}
    return S.subst_many(t, lam=lam, term=term)


def search_inequivalence(lhs: Term, rhs: Term, budget: Budget = DEFAULT_BUDGET,
                         stop_at_suspected: bool = False) -> Witness | None:
    """Look for a closed substitution and a stack separating the two sides.

    Returns the first sound witness in enumeration order; if there is none,
    the first suspected one (a side ran out of fuel); otherwise None.
    """
    lhs, rhs = S.erase_hints(lhs), S.erase_hints(rhs)
    fv = free_vars(lhs) | free_vars(rhs)
    bottom = "α"
    while bottom in fv.mu:
        bottom = bottom + "'"
    ctors, labels = _alphabet([lhs, rhs])
    values = _closed_values(ctors, labels, max(budget.subst_size, 2))
    push_values = [v for v in values if S.size(v) <= 2]
    layers = _probe_layers(ctors, labels, push_values)
    oracle = SearchOracle(budget, budget.delta_index)
    suspected = None
    for sub in _substitutions(lhs, rhs, values, budget):
        t, u = _apply_subst(lhs, sub), _apply_subst(rhs, sub)
        for pi in _stacks(layers, budget.depth, bottom):
            w = _compare(t, u, pi, sub, budget, oracle)
            if w is None:
                continue
            if w.sound:
                return w
            if suspected is None:
                suspected = w
                if stop_at_suspected:
                    return w
    return suspected


def _compare(t, u, pi, sub, budget, oracle):
    o1, cyc1 = run_detecting_cycles(Process(t, pi), budget.fuel, oracle)
    o2, cyc2 = run_detecting_cycles(Process(u, pi), budget.fuel, oracle)
    c1, c2 = _converges(o1, pi), _converges(o2, pi)
    if c1 == c2:
        return None
    other, cyc = (o2, cyc2) if c1 else (o1, cyc1)
    sound = cyc or (isinstance(other, Halted) and not isinstance(other.cls, DeltaLike))
    return Witness(pi, sub, o1, o2, sound, t, u)


def _converges(o: RunOutcome, pi: Stack) -> bool:
    return isinstance(o, Converged)


class SearchOracle:
    """δ-oracle at a given index: fires when a search at a strictly smaller
    index finds a sound separating witness."""

    def __init__(self, budget: Budget, index: int):
        self.budget = budget
        self.index = index
        self._cache: dict = {}

    def inequivalent(self, v: Value, w: Value) -> bool:
        if self.index <= 0:
            return False
        key = (alpha_key(v), alpha_key(w))
        if key not in self._cache:
            sub = replace(self.budget, delta_index=self.index - 1)
            wit = search_inequivalence(v, w, sub)
            self._cache[key] = wit is not None and wit.sound
        return self._cache[key]


def value_candidates(E: EquationalContext, u: Term, budget: Budget = DEFAULT_BUDGET) -> list:
    """Values that `u` might provably equal: its normal form, and the value
    members of its class after closing the context (recursive definitions
    unfolded where productive).  Callers must confirm with `decide`."""
    u = S.erase_hints(u)
    out, seen = [], set()

    def push(v):
        if isinstance(v, Value) and not isinstance(v, Scissors):
            k = alpha_key(v)
            if k not in seen:
                seen.add(k)
                out.append(v)

    push(normalize(u, min(budget.fuel, 2_000)))
    eng, info, _ = _run_engine(tuple(E), budget, extra=(u,))
    if info is None and alpha_key(u) in eng.parent:
        root = eng.find(alpha_key(u))
        r = eng.rep(root, True)
        if r is not None:
            push(eng.canon(eng.terms[r]))
        for m in eng.members.get(root, ()):
            push(eng.terms[m])
    for c in E:
        if c.equiv:
            if alpha_eq_terms(c.lhs, u):
                push(c.rhs)
            elif alpha_eq_terms(c.rhs, u):
                push(c.lhs)
    return out


def alpha_eq_terms(a, b) -> bool:
    return alpha_key(a) == alpha_key(b)
