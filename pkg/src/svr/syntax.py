"""Abstract syntax of the call-by-value lambda-mu calculus.

Values, terms, stacks and processes are immutable dataclasses.  Values are a
subclass of terms, so a value can be used wherever a term is expected.  Three
kinds of variables live in disjoint namespaces: lambda-variables (`Var`),
stack variables (`SVar`) and term variables (`TVar`).  Term variables are never
bound inside terms.

Elaboration hints (`Annot`, `Inst`, `Rewrite`) are terms only the checker
understands; `erase_hints` strips them before anything reaches the machine.
"""

from __future__ import annotations

import contextlib
import itertools
import sys
from dataclasses import dataclass, fields
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Union

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


def _node(cls):
    """Frozen dataclass with a memoised structural hash."""
    cls = dataclass(frozen=True, repr=False)(cls)
    names = tuple(f.name for f in fields(cls))
    tag = cls.__name__

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((tag,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_hash", h)
        return h

    cls.__hash__ = __hash__
    return cls


class Term:
    __slots__ = ()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {pretty(self)}>"


class Value(Term):
    __slots__ = ()


class Stack:
    __slots__ = ()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {pretty(self)}>"


# -- values ------------------------------------------------------------------

@_node
class Var(Value):
    name: str


@_node
class Lam(Value):
    var: str
    body: Term


@_node
class Ctor(Value):
    name: str
    arg: Value


@_node
class Record(Value):
    fields: tuple  # ((label, Value), ...) sorted by label

    def __post_init__(self):
        labels = [l for l, _ in self.fields]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate record label in {labels}")
        if labels != sorted(labels):
            object.__setattr__(self, "fields", tuple(sorted(self.fields, key=lambda f: f[0])))

    def get(self, label: str):
        for l, v in self.fields:
            if l == label:
                return v
        return None

    @property
    def labels(self) -> frozenset:
        return frozenset(l for l, _ in self.fields)


@_node
class Scissors(Value):
    """The value on which the machine fails.  Internal/erroneous marker."""


UNIT = Record(())


def record(**kw: Value) -> Record:
    return Record(tuple(sorted(kw.items())))


# -- terms -------------------------------------------------------------------

@_node
class TVar(Term):
    name: str


@_node
class App(Term):
    fn: Term
    arg: Term


@_node
class Mu(Term):
    var: str
    body: Term


@_node
class Process(Term):
    """`t ∗ π`: both a machine state and a term (restart)."""
    term: Term
    stack: Stack


@_node
class Proj(Term):
    value: Value
    label: str


@_node
class Case(Term):
    value: Value
    branches: tuple  # ((ctor, bound-name, Term), ...) sorted by ctor

    def __post_init__(self):
        ctors = [c for c, _, _ in self.branches]
        if len(set(ctors)) != len(ctors):
            raise ValueError(f"duplicate case branch in {ctors}")
        if ctors != sorted(ctors):
            object.__setattr__(self, "branches", tuple(sorted(self.branches, key=lambda b: b[0])))

    def branch(self, ctor: str):
        for c, x, t in self.branches:
            if c == ctor:
                return x, t
        return None


@_node
class Delta(Term):
    """δ(v, w): steps to v only when v and w are known inequivalent.  Internal."""
    left: Value
    right: Value


@_node
class Unit(Term):
    """unit(v): steps to {} when v is {}.  Internal probe term."""
    value: Value


# -- elaboration hints (checker only) ----------------------------------------

@_node
class Annot(Term):
    term: Term
    formula: object


@_node
class Inst(Term):
    """`t{w}`: quantifier witness; a Term, or a PredicateDef for predicates."""
    term: Term
    witness: object


@_node
class Rewrite(Term):
    hyp: str
    term: Term


# -- stacks ------------------------------------------------------------------

@_node
class SVar(Stack):
    name: str


@_node
class Push(Stack):
    head: Value
    tail: Stack


@_node
class Frame(Stack):
    fn: Term
    tail: Stack


def stack_bottom(pi: Stack) -> SVar:
    while not isinstance(pi, SVar):
        pi = pi.tail
    return pi


Syntax = Union[Term, Stack]


# -- fresh names -------------------------------------------------------------

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_SUBDIGITS = "₀₁₂₃₄₅₆₇₈₉"
_counter = itertools.count(1)


def fresh(base: str) -> str:
    """Return a name never produced before; user identifiers cannot collide
    because the lexer rejects subscript digits."""
    stem = base.rstrip(_SUBDIGITS) or "v"
    return stem + str(next(_counter)).translate(_SUB)


@contextlib.contextmanager
def fresh_names() -> Iterator[None]:
    """Restart the name supply for one self-contained job (e.g. one CLI run),
    so that output is reproducible."""
    global _counter
    saved = _counter
    _counter = itertools.count(1)
    try:
        yield
    finally:
        _counter = saved


# -- free variables ----------------------------------------------------------

class VarSets(NamedTuple):
    lam: frozenset
    mu: frozenset
    term: frozenset

    def __or__(self, other):  # type: ignore[override]
        return VarSets(self.lam | other.lam, self.mu | other.mu, self.term | other.term)

    def closed(self) -> bool:
        return not (self.lam or self.mu or self.term)


EMPTY = VarSets(frozenset(), frozenset(), frozenset())


def _union(parts: Iterable[VarSets]) -> VarSets:
    lam, mu, term = set(), set(), set()
    for p in parts:
        lam |= p.lam
        mu |= p.mu
        term |= p.term
    return VarSets(frozenset(lam), frozenset(mu), frozenset(term))


@lru_cache(maxsize=200_000)
def free_vars(psi) -> VarSets:
    match psi:
        case Var(x):
            return VarSets(frozenset([x]), frozenset(), frozenset())
        case TVar(a):
            return VarSets(frozenset(), frozenset(), frozenset([a]))
        case SVar(al):
            return VarSets(frozenset(), frozenset([al]), frozenset())
        case Lam(x, body):
            fv = free_vars(body)
            return fv._replace(lam=fv.lam - {x})
        case Mu(al, body):
            fv = free_vars(body)
            return fv._replace(mu=fv.mu - {al})
        case Case(v, branches):
            parts = [free_vars(v)]
            for _, x, t in branches:
                fv = free_vars(t)
                parts.append(fv._replace(lam=fv.lam - {x}))
            return _union(parts)
        case Record(fs):
            return _union(free_vars(v) for _, v in fs)
        case Scissors():
            return EMPTY
        case Ctor(_, v) | Proj(v, _) | Unit(v):
            return free_vars(v)
        case App(a, b) | Process(a, b) | Push(a, b) | Frame(a, b) | Delta(a, b):
            return free_vars(a) | free_vars(b)
        case Annot(t, _) | Rewrite(_, t):
            return free_vars(t)
        case Inst(t, w):
            fv = free_vars(t)
            return fv | free_vars(w) if isinstance(w, Term) else fv
    raise TypeError(f"not syntax: {psi!r}")


def is_closed(psi) -> bool:
    return free_vars(psi).closed()


# -- substitution ------------------------------------------------------------

class _Subst:
    """Simultaneous substitution for the three variable kinds."""

    def __init__(self, lam=None, mu=None, term=None):
        self.lam = lam or {}
        self.mu = mu or {}
        self.term = term or {}

    def relevant(self, fv: VarSets) -> "_Subst | None":
        lam = {k: v for k, v in self.lam.items() if k in fv.lam}
        mu = {k: v for k, v in self.mu.items() if k in fv.mu}
        term = {k: v for k, v in self.term.items() if k in fv.term}
        if not (lam or mu or term):
            return None
        return _Subst(lam, mu, term)

    def range_fv(self) -> VarSets:
        return _union(free_vars(r) for r in
                      itertools.chain(self.lam.values(), self.mu.values(), self.term.values()))


def _apply(psi, s: _Subst):
    s = s.relevant(free_vars(psi))
    if s is None:
        return psi
    match psi:
        case Var(x):
            return s.lam[x]
        case TVar(a):
            return s.term[a]
        case SVar(al):
            return s.mu[al]
        case Lam(x, body):
            x2, s2 = _bind_lam(x, body, s)
            return Lam(x2, _apply(body, s2))
        case Mu(al, body):
            rng = s.range_fv()
            if al in rng.mu:
                al2 = fresh(al)
                s2 = _Subst(dict(s.lam), {**s.mu, al: SVar(al2)}, dict(s.term))
                return Mu(al2, _apply(body, s2))
            return Mu(al, _apply(body, s))
        case Case(v, branches):
            out = []
            for c, x, t in branches:
                x2, s2 = _bind_lam(x, t, s)
                out.append((c, x2, _apply(t, s2)))
            return Case(_apply(v, s), tuple(out))
        case Ctor(c, v):
            return Ctor(c, _apply(v, s))
        case Record(fs):
            return Record(tuple((l, _apply(v, s)) for l, v in fs))
        case App(a, b):
            return App(_apply(a, s), _apply(b, s))
        case Process(t, pi):
            return Process(_apply(t, s), _apply(pi, s))
        case Proj(v, l):
            return Proj(_apply(v, s), l)
        case Delta(v, w):
            return Delta(_apply(v, s), _apply(w, s))
        case Unit(v):
            return Unit(_apply(v, s))
        case Push(v, pi):
            return Push(_apply(v, s), _apply(pi, s))
        case Frame(t, pi):
            return Frame(_apply(t, s), _apply(pi, s))
        case Annot(t, f):
            return Annot(_apply(t, s), f)
        case Rewrite(h, t):
            return Rewrite(h, _apply(t, s))
        case Inst(t, w):
            return Inst(_apply(t, s), _apply(w, s) if isinstance(w, Term) else w)
    raise TypeError(f"not syntax: {psi!r}")


def _bind_lam(x: str, body, s: _Subst):
    """Handle a λ-binder `x` scoping over `body`: drop x from the domain and
    rename it when it would capture a free variable of the range."""
    lam = {k: v for k, v in s.lam.items() if k != x}
    s1 = _Subst(lam, s.mu, s.term).relevant(free_vars(body))
    if s1 is None:
        return x, _Subst()
    if x in s1.range_fv().lam:
        x2 = fresh(x)
        s1.lam[x] = Var(x2)
        return x2, s1
    return x, s1


def subst(psi, var, replacement):
    """Capture-avoiding substitution of a single variable.

    `var` selects the kind: `Var` (replacement a Value), `SVar` (a Stack) or
    `TVar` (a Term).
    """
    match var:
        case Var(x):
            if not isinstance(replacement, Value):
                raise TypeError("λ-variables are substituted by values")
            return _apply(psi, _Subst(lam={x: replacement}))
        case SVar(al):
            if not isinstance(replacement, Stack):
                raise TypeError("stack variables are substituted by stacks")
            return _apply(psi, _Subst(mu={al: replacement}))
        case TVar(a):
            if not isinstance(replacement, Term):
                raise TypeError("term variables are substituted by terms")
            return _apply(psi, _Subst(term={a: replacement}))
    raise TypeError(f"not a variable: {var!r}")


def subst_many(psi, lam=None, mu=None, term=None):
    return _apply(psi, _Subst(dict(lam or {}), dict(mu or {}), dict(term or {})))


# -- alpha equivalence -------------------------------------------------------

def alpha_key(psi, env=None):
    """Nameless key: bound variables become binder depths, free ones keep
    their names.  Two objects are alpha-equivalent iff their keys are equal.

    `env` maps (kind, name) to a binder index; formulas reuse it to bind term
    variables.
    """
    return _key(psi, env or {}, 0)


def _key(psi, env, depth):
    match psi:
        case Var(x):
            i = env.get(("x", x))
            return ("x", x) if i is None else ("bx", depth - i)
        case TVar(a):
            i = env.get(("a", a))
            return ("a", a) if i is None else ("ba", depth - i)
        case SVar(al):
            i = env.get(("m", al))
            return ("m", al) if i is None else ("bm", depth - i)
        case Lam(x, body):
            return ("lam", _key(body, {**env, ("x", x): depth + 1}, depth + 1))
        case Mu(al, body):
            return ("mu", _key(body, {**env, ("m", al): depth + 1}, depth + 1))
        case Case(v, branches):
            return ("case", _key(v, env, depth),
                    tuple((c, _key(t, {**env, ("x", x): depth + 1}, depth + 1))
                          for c, x, t in branches))
        case Ctor(c, v):
            return ("ctor", c, _key(v, env, depth))
        case Record(fs):
            return ("rec", tuple((l, _key(v, env, depth)) for l, v in fs))
        case Scissors():
            return ("scissors",)
        case App(a, b):
            return ("app", _key(a, env, depth), _key(b, env, depth))
        case Process(t, pi):
            return ("proc", _key(t, env, depth), _key(pi, env, depth))
        case Proj(v, l):
            return ("proj", _key(v, env, depth), l)
        case Delta(v, w):
            return ("delta", _key(v, env, depth), _key(w, env, depth))
        case Unit(v):
            return ("unit", _key(v, env, depth))
        case Push(v, pi):
            return ("push", _key(v, env, depth), _key(pi, env, depth))
        case Frame(t, pi):
            return ("frame", _key(t, env, depth), _key(pi, env, depth))
        case Annot(t, f):
            return ("annot", _key(t, env, depth), f)
        case Rewrite(h, t):
            return ("rewrite", h, _key(t, env, depth))
        case Inst(t, w):
            return ("inst", _key(t, env, depth), _key(w, env, depth) if isinstance(w, Term) else w)
    if hasattr(psi, "alpha_key"):
        return psi.alpha_key(env, depth)
    raise TypeError(f"not syntax: {psi!r}")


def alpha_eq(a, b) -> bool:
    return a is b or alpha_key(a) == alpha_key(b)


# -- misc --------------------------------------------------------------------

def size(psi) -> int:
    match psi:
        case Var() | TVar() | SVar() | Scissors():
            return 1
        case Lam(_, t) | Mu(_, t) | Ctor(_, t) | Proj(t, _) | Unit(t):
            return 1 + size(t)
        case Record(fs):
            return 1 + sum(size(v) for _, v in fs)
        case Case(v, branches):
            return 1 + size(v) + sum(size(t) for _, _, t in branches)
        case App(a, b) | Process(a, b) | Push(a, b) | Frame(a, b) | Delta(a, b):
            return 1 + size(a) + size(b)
        case Annot(t, _) | Rewrite(_, t) | Inst(t, _):
            return size(t)
    raise TypeError(f"not syntax: {psi!r}")


def erase_hints(t):
    """Drop checker-only annotations, leaving pure calculus syntax."""
    match t:
        case Annot(u, _) | Rewrite(_, u) | Inst(u, _):
            return erase_hints(u)
        case Var() | TVar() | SVar() | Scissors():
            return t
        case Lam(x, b):
            return Lam(x, erase_hints(b))
        case Mu(a, b):
            return Mu(a, erase_hints(b))
        case Ctor(c, v):
            return Ctor(c, erase_hints(v))
        case Record(fs):
            return Record(tuple((l, erase_hints(v)) for l, v in fs))
        case App(a, b):
            return App(erase_hints(a), erase_hints(b))
        case Process(a, b):
            return Process(erase_hints(a), erase_hints(b))
        case Proj(v, l):
            return Proj(erase_hints(v), l)
        case Case(v, bs):
            return Case(erase_hints(v), tuple((c, x, erase_hints(b)) for c, x, b in bs))
        case Delta(v, w):
            return Delta(erase_hints(v), erase_hints(w))
        case Unit(v):
            return Unit(erase_hints(v))
        case Push(v, pi):
            return Push(erase_hints(v), erase_hints(pi))
        case Frame(u, pi):
            return Frame(erase_hints(u), erase_hints(pi))
    raise TypeError(f"not syntax: {t!r}")


def has_hints(t) -> bool:
    return erase_hints(t) != t


def is_value(t) -> bool:
    return isinstance(t, Value)


def subterms(t) -> Iterator:
    """All sub-objects (terms, values, stacks), including t itself."""
    yield t
    match t:
        case Lam(_, b) | Mu(_, b) | Ctor(_, b) | Proj(b, _) | Unit(b):
            yield from subterms(b)
        case Record(fs):
            for _, v in fs:
                yield from subterms(v)
        case Case(v, bs):
            yield from subterms(v)
            for _, _, b in bs:
                yield from subterms(b)
        case App(a, b) | Process(a, b) | Push(a, b) | Frame(a, b) | Delta(a, b):
            yield from subterms(a)
            yield from subterms(b)
        case Annot(u, _) | Rewrite(_, u) | Inst(u, _):
            yield from subterms(u)


# -- pretty printing ---------------------------------------------------------

class Prec(Enum):
    PROC = 0
    BINDER = 1
    APP = 2
    ATOM = 3


def pretty(psi) -> str:
    """Render in the standard core notation: `λx t`, `μα t`, `t ∗ π`, `[t]π`, `v.π`."""
    if isinstance(psi, Stack):
        return _pstack(psi)
    return _pterm(psi, Prec.PROC)


def _wrap(s: str, have: Prec, need: Prec) -> str:
    return f"({s})" if have.value < need.value else s


def _pterm(t, need: Prec) -> str:
    match t:
        case Var(x) | TVar(x):
            return x
        case Scissors():
            return "✂"
        case Ctor(c, v):
            return f"{c}[]" if v == UNIT else f"{c}[{_pterm(v, Prec.PROC)}]"
        case Record(fs):
            if not fs:
                return "{}"
            return "{" + "; ".join(f"{l} = {_pterm(v, Prec.PROC)}" for l, v in fs) + "}"
        case Lam(x, b):
            return _wrap(f"λ{x} {_pterm(b, Prec.BINDER)}", Prec.BINDER, need)
        case Mu(a, b):
            return _wrap(f"μ{a} {_pterm(b, Prec.BINDER)}", Prec.BINDER, need)
        case App(f, u):
            return _wrap(f"{_pterm(f, Prec.APP)} {_pterm(u, Prec.ATOM)}", Prec.APP, need)
        case Process(u, pi):
            return _wrap(f"{_pterm(u, Prec.BINDER)} ∗ {_pstack(pi)}", Prec.PROC, need)
        case Proj(v, l):
            return f"{_pterm(v, Prec.ATOM)}.{l}"
        case Case(v, bs):
            arms = " | ".join(f"{c}[{x}] → {_pterm(b, Prec.PROC)}" for c, x, b in bs)
            return f"case {_pterm(v, Prec.ATOM)} {{{arms}}}"
        case Delta(v, w):
            return f"δ({_pterm(v, Prec.PROC)}, {_pterm(w, Prec.PROC)})"
        case Unit(v):
            return f"unit({_pterm(v, Prec.PROC)})"
        case Annot(u, f):
            return f"({_pterm(u, Prec.PROC)} : {f})"
        case Inst(u, w):
            ws = _pterm(w, Prec.PROC) if isinstance(w, Term) else str(w)
            return f"{_pterm(u, Prec.ATOM)}{{{ws}}}"
        case Rewrite(h, u):
            return _wrap(f"rewrite {h} in {_pterm(u, Prec.BINDER)}", Prec.BINDER, need)
    raise TypeError(f"not a term: {t!r}")


def _pstack(pi: Stack) -> str:
    match pi:
        case SVar(a):
            return a
        case Push(v, rest):
            return f"{_pterm(v, Prec.ATOM)}.{_pstack(rest)}"
        case Frame(t, rest):
            return f"[{_pterm(t, Prec.PROC)}]{_pstack(rest)}"
    raise TypeError(f"not a stack: {pi!r}")


# -- handy constructors used by tests and probes -----------------------------

def lam(x: str, body: Term) -> Lam:
    return Lam(x, body)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def case(v: Value, **branches) -> Case:
    """`case(v, C=("x", t), ...)`."""
    return Case(v, tuple((c, x, t) for c, (x, t) in sorted(branches.items())))


def omega() -> Term:
    d = Lam("x", App(Var("x"), Var("x")))
    return App(d, d)
