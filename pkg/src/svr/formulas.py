"""Second-order formulas, typing contexts and context validity.

Formulas mention terms (as individuals) and predicate variables.  Term
variables are bound by `ForallT`/`ExistsT`, predicate variables by
`ForallP`/`ExistsP`.  `Named` refers to a type definition held in a
`TypeTable`; it never unfolds by itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Union

from . import syntax as S
from .syntax import Term, TVar, Var, _node, alpha_key, fresh, free_vars


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return pretty_formula(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {pretty_formula(self)}>"


@_node
class PredApp(Formula):
    var: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@_node
class Arrow(Formula):
    dom: Formula
    cod: Formula


@_node
class ForallT(Formula):
    var: str
    body: Formula


@_node
class ExistsT(Formula):
    var: str
    body: Formula


@_node
class ForallP(Formula):
    var: str
    arity: int
    body: Formula


@_node
class ExistsP(Formula):
    var: str
    arity: int
    body: Formula


@_node
class RecordTy(Formula):
    fields: tuple  # ((label, Formula), ...) sorted

    def __post_init__(self):
        labels = [l for l, _ in self.fields]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate record label in {labels}")
        if labels != sorted(labels):
            object.__setattr__(self, "fields", tuple(sorted(self.fields, key=lambda f: f[0])))

    def get(self, label):
        for l, a in self.fields:
            if l == label:
                return a
        return None


@_node
class VariantTy(Formula):
    ctors: tuple  # ((ctor, Formula), ...) sorted

    def __post_init__(self):
        names = [c for c, _ in self.ctors]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constructor in {names}")
        if names != sorted(names):
            object.__setattr__(self, "ctors", tuple(sorted(self.ctors, key=lambda f: f[0])))

    def get(self, ctor):
        for c, a in self.ctors:
            if c == ctor:
                return a
        return None


@_node
class Member(Formula):
    term: Term
    formula: Formula


@_node
class Restrict(Formula):
    formula: Formula
    lhs: Term
    rhs: Term


@_node
class Named(Formula):
    name: str


@_node
class PredicateDef:
    """Syntactic predicate `(a₁ … aₙ ↦ B)` used as a substitutend."""
    params: tuple
    body: Formula

    def __str__(self):
        if not self.params:
            return pretty_formula(self.body)
        return f"({' '.join(self.params)}, {pretty_formula(self.body)})"

    @property
    def arity(self) -> int:
        return len(self.params)

    def alpha_key(self, env, depth):
        env2 = dict(env)
        for i, a in enumerate(self.params):
            env2[("a", a)] = depth + 1 + i
        return ("pdef", len(self.params), _fkey(self.body, env2, depth + len(self.params)))


@dataclass(frozen=True)
class PredVar:
    name: str
    arity: int


# -- sugars ------------------------------------------------------------------

def sugar_bot() -> Formula:
    return ForallP("X", 0, PredApp("X"))


def sugar_top() -> Formula:
    return ExistsP("X", 0, PredApp("X"))


BOT = sugar_bot()
TOP = sugar_top()


def sugar_equation(t: Term, u: Term) -> Formula:
    return Restrict(TOP, t, u)


def sugar_restrict_neq(a: Formula, t: Term, u: Term) -> Formula:
    return Arrow(Restrict(a, t, u), BOT)


def sugar_inequation(t: Term, u: Term) -> Formula:
    return sugar_restrict_neq(TOP, t, u)


def sugar_pi(a: str, dom: Formula, cod: Formula) -> Formula:
    return ForallT(a, Arrow(Member(TVar(a), dom), cod))


def as_pi(f: Formula):
    """Recognise `∀a (a ∈ A ⇒ B)`; return (a, A, B) or None."""
    if isinstance(f, ForallT) and isinstance(f.body, Arrow):
        m = f.body.dom
        if isinstance(m, Member) and m.term == TVar(f.var):
            return f.var, m.formula, f.body.cod
    return None


def is_bot(f: Formula) -> bool:
    return isinstance(f, ForallP) and f.arity == 0 and f.body == PredApp(f.var)


def is_top(f: Formula) -> bool:
    return isinstance(f, ExistsP) and f.arity == 0 and f.body == PredApp(f.var)


# -- free variables ----------------------------------------------------------

class FormulaVars(NamedTuple):
    lam: frozenset
    term: frozenset
    pred: frozenset
    mu: frozenset = frozenset()

    def __or__(self, o):  # type: ignore[override]
        return FormulaVars(self.lam | o.lam, self.term | o.term, self.pred | o.pred, self.mu | o.mu)


_NOFV = FormulaVars(frozenset(), frozenset(), frozenset())


def _term_fv(t: Term) -> FormulaVars:
    fv = free_vars(t)
    return FormulaVars(fv.lam, fv.term, frozenset(), fv.mu)


@lru_cache(maxsize=100_000)
def formula_fv(f) -> FormulaVars:
    match f:
        case PredApp(x, args):
            out = FormulaVars(frozenset(), frozenset(), frozenset([x]))
            for t in args:
                out = out | _term_fv(t)
            return out
        case Arrow(a, b):
            return formula_fv(a) | formula_fv(b)
        case ForallT(a, b) | ExistsT(a, b):
            fv = formula_fv(b)
            return fv._replace(term=fv.term - {a})
        case ForallP(x, _, b) | ExistsP(x, _, b):
            fv = formula_fv(b)
            return fv._replace(pred=fv.pred - {x})
        case RecordTy(fs) | VariantTy(fs):
            out = _NOFV
            for _, a in fs:
                out = out | formula_fv(a)
            return out
        case Member(t, a):
            return _term_fv(t) | formula_fv(a)
        case Restrict(a, t, u):
            return formula_fv(a) | _term_fv(t) | _term_fv(u)
        case Named():
            return _NOFV
        case PredicateDef(params, body):
            fv = formula_fv(body)
            return fv._replace(term=fv.term - set(params))
    raise TypeError(f"not a formula: {f!r}")


# -- substitution ------------------------------------------------------------

def formula_subst(f: Formula, target, replacement) -> Formula:
    """Capture-avoiding substitution into a formula.

    `target` is a `TVar` (replacement: Term), a `Var` (replacement: Value) or
    a `PredVar` (replacement: PredicateDef of the same arity).
    """
    match target:
        case TVar(a):
            return _fsub(f, term={a: replacement})
        case Var(x):
            return _fsub(f, lam={x: replacement})
        case PredVar(x, n):
            if not isinstance(replacement, PredicateDef):
                raise TypeError("predicate variables are substituted by PredicateDef")
            if replacement.arity != n:
                raise ValueError(f"arity mismatch substituting {x}: {n} vs {replacement.arity}")
            return _fsub(f, pred={x: replacement})
    raise TypeError(f"not a variable: {target!r}")


def _range_fv(lam, term, pred) -> FormulaVars:
    out = _NOFV
    for r in list(lam.values()) + list(term.values()):
        out = out | _term_fv(r)
    for d in pred.values():
        out = out | formula_fv(d)
    return out


def _fsub(f, lam=None, term=None, pred=None):
    lam, term, pred = lam or {}, term or {}, pred or {}
    fv = formula_fv(f)
    lam = {k: v for k, v in lam.items() if k in fv.lam}
    term = {k: v for k, v in term.items() if k in fv.term}
    pred = {k: v for k, v in pred.items() if k in fv.pred}
    if not (lam or term or pred):
        return f

    def tsub(t):
        return S.subst_many(t, lam=lam, term=term)

    match f:
        case PredApp(x, args):
            args2 = tuple(tsub(t) for t in args)
            if x in pred:
                d = pred[x]
                if len(args2) != d.arity:
                    raise ValueError(f"arity mismatch applying {x}")
                return _fsub(d.body, term=dict(zip(d.params, args2)))
            return PredApp(x, args2)
        case Arrow(a, b):
            return Arrow(_fsub(a, lam, term, pred), _fsub(b, lam, term, pred))
        case ForallT(a, b) | ExistsT(a, b):
            term2 = {k: v for k, v in term.items() if k != a}
            rng = _range_fv(lam, term2, pred)
            if a in rng.term:
                a2 = fresh(a)
                term2[a] = TVar(a2)
                a = a2
            return type(f)(a, _fsub(b, lam, term2, pred))
        case ForallP(x, n, b) | ExistsP(x, n, b):
            pred2 = {k: v for k, v in pred.items() if k != x}
            rng = _range_fv(lam, term, pred2)
            if x in rng.pred:
                x2 = fresh(x)
                pred2[x] = PredicateDef(tuple(f"p{i}" for i in range(n)),
                                        PredApp(x2, tuple(TVar(f"p{i}") for i in range(n))))
                x = x2
            return type(f)(x, n, _fsub(b, lam, term, pred2))
        case RecordTy(fs):
            return RecordTy(tuple((l, _fsub(a, lam, term, pred)) for l, a in fs))
        case VariantTy(cs):
            return VariantTy(tuple((c, _fsub(a, lam, term, pred)) for c, a in cs))
        case Member(t, a):
            return Member(tsub(t), _fsub(a, lam, term, pred))
        case Restrict(a, t, u):
            return Restrict(_fsub(a, lam, term, pred), tsub(t), tsub(u))
        case Named():
            return f
    raise TypeError(f"not a formula: {f!r}")


def rename_binder(f: Formula, new: str) -> Formula:
    """Rename the outermost quantifier's variable to `new`."""
    match f:
        case ForallT(a, b) | ExistsT(a, b):
            return type(f)(new, formula_subst(b, TVar(a), TVar(new)))
        case ForallP(x, n, b) | ExistsP(x, n, b):
            params = tuple(f"p{i}" for i in range(n))
            d = PredicateDef(params, PredApp(new, tuple(TVar(p) for p in params)))
            return type(f)(new, n, formula_subst(b, PredVar(x, n), d))
    raise TypeError(f"not a quantifier: {f!r}")


# -- alpha equivalence -------------------------------------------------------

def formula_key(f, env=None):
    return _fkey(f, env or {}, 0)


def _fkey(f, env, depth):
    match f:
        case PredApp(x, args):
            i = env.get(("X", x))
            head = ("X", x) if i is None else ("bX", depth - i)
            return ("papp", head, tuple(S._key(t, env, depth) for t in args))
        case Arrow(a, b):
            return ("arrow", _fkey(a, env, depth), _fkey(b, env, depth))
        case ForallT(a, b) | ExistsT(a, b):
            return (type(f).__name__, _fkey(b, {**env, ("a", a): depth + 1}, depth + 1))
        case ForallP(x, n, b) | ExistsP(x, n, b):
            return (type(f).__name__, n, _fkey(b, {**env, ("X", x): depth + 1}, depth + 1))
        case RecordTy(fs):
            return ("recty", tuple((l, _fkey(a, env, depth)) for l, a in fs))
        case VariantTy(cs):
            return ("varty", tuple((c, _fkey(a, env, depth)) for c, a in cs))
        case Member(t, a):
            return ("mem", S._key(t, env, depth), _fkey(a, env, depth))
        case Restrict(a, t, u):
            return ("restr", _fkey(a, env, depth), S._key(t, env, depth), S._key(u, env, depth))
        case Named(n):
            return ("named", n)
        case PredicateDef():
            return f.alpha_key(env, depth)
    raise TypeError(f"not a formula: {f!r}")


def formula_alpha_eq(a, b) -> bool:
    return a is b or formula_key(a) == formula_key(b)


# -- named types -------------------------------------------------------------

class TypeTable:
    """Named type definitions, each unfolding one step on demand."""

    def __init__(self, defs: dict[str, Formula] | None = None):
        self.defs: dict[str, Formula] = dict(defs or {})

    def __contains__(self, name):
        return name in self.defs

    def unfold(self, f: Formula) -> Formula:
        if isinstance(f, Named):
            try:
                return self.defs[f.name]
            except KeyError:
                raise KeyError(f"unknown type {f.name}") from None
        return f

    def head(self, f: Formula) -> Formula:
        """Unfold names until a non-name former appears.  Terminates because
        definitions are checked to be guarded (see `check_guarded`)."""
        seen = set()
        while isinstance(f, Named):
            if f.name in seen:
                raise ValueError(f"unguarded recursive type {f.name}")
            seen.add(f.name)
            f = self.unfold(f)
        return f

    def add(self, name: str, body: Formula) -> None:
        self.defs[name] = body
        try:
            self.check_guarded(name)
        except ValueError:
            del self.defs[name]
            raise

    def check_guarded(self, name: str) -> None:
        """Reject a definition that reaches itself through aliases only."""
        seen = []
        f: Formula = Named(name)
        while isinstance(f, Named):
            if f.name in seen:
                raise ValueError(f"type {name} is cyclic without a variant/record guard")
            seen.append(f.name)
            if f.name not in self.defs:
                raise ValueError(f"unknown type {f.name}")
            f = self.defs[f.name]

    def copy(self) -> "TypeTable":
        return TypeTable(self.defs)


EMPTY_TYPES = TypeTable()


def is_pure(f: Formula, types: TypeTable | None = None, _seen=None) -> bool:
    """No arrow anywhere, following named types (each name once)."""
    seen = set() if _seen is None else _seen
    match f:
        case Arrow():
            return False
        case PredApp():
            return True
        case ForallT(_, b) | ExistsT(_, b) | ForallP(_, _, b) | ExistsP(_, _, b) | Member(_, b) | Restrict(b, _, _):
            return is_pure(b, types, seen)
        case RecordTy(fs) | VariantTy(fs):
            return all(is_pure(a, types, seen) for _, a in fs)
        case Named(n):
            if n in seen or types is None or n not in types:
                return True
            seen.add(n)
            return is_pure(types.defs[n], types, seen)
    raise TypeError(f"not a formula: {f!r}")


def is_first_order(f: Formula, types: TypeTable | None = None, _seen=None) -> bool:
    """Pure and built only from variants, records, equations and names."""
    seen = set() if _seen is None else _seen
    match f:
        case RecordTy(fs) | VariantTy(fs):
            return all(is_first_order(a, types, seen) for _, a in fs)
        case Restrict(a, _, _) | Member(_, a):
            return is_first_order(a, types, seen)
        case Named(n):
            if n in seen or types is None or n not in types:
                return n in seen
            seen.add(n)
            return is_first_order(types.defs[n], types, seen)
        case ExistsP():
            return is_top(f)
    return False


# -- typing contexts ---------------------------------------------------------

@_node
class LambdaHyp:
    var: str
    formula: Formula


@_node
class StackHyp:
    var: str
    formula: Formula


@_node
class TermDecl:
    var: str


@_node
class PredDecl:
    var: str
    arity: int


@_node
class EquivHyp:
    lhs: Term
    rhs: Term


@_node
class InequivHyp:
    lhs: Term
    rhs: Term


Entry = Union[LambdaHyp, StackHyp, TermDecl, PredDecl, EquivHyp, InequivHyp]
Context = tuple  # tuple[Entry, ...]


class Domain(NamedTuple):
    lam: frozenset
    mu: frozenset
    term: frozenset
    pred: dict  # name -> arity


def domain(ctx: Iterable[Entry]) -> Domain:
    lam, mu, term, pred = set(), set(), set(), {}
    for e in ctx:
        match e:
            case LambdaHyp(x, _):
                lam.add(x)
            case StackHyp(a, _):
                mu.add(a)
            case TermDecl(a):
                term.add(a)
            case PredDecl(x, n):
                pred[x] = n
    return Domain(frozenset(lam), frozenset(mu), frozenset(term), pred)


def context_fv(ctx: Iterable[Entry]) -> FormulaVars:
    out = _NOFV
    for e in ctx:
        match e:
            case LambdaHyp(x, a):
                fv = formula_fv(a)
                out = out | fv | FormulaVars(frozenset([x]), frozenset(), frozenset())
            case StackHyp(al, a):
                out = out | formula_fv(a) | FormulaVars(frozenset(), frozenset(), frozenset(), frozenset([al]))
            case TermDecl(a):
                out = out | FormulaVars(frozenset(), frozenset([a]), frozenset())
            case PredDecl(x, _):
                out = out | FormulaVars(frozenset(), frozenset(), frozenset([x]))
            case EquivHyp(t, u) | InequivHyp(t, u):
                out = out | _term_fv(t) | _term_fv(u)
    return out


def _pred_arities(f, acc=None, bound=frozenset()):
    """Collect (name, arity) for free predicate applications."""
    acc = [] if acc is None else acc
    match f:
        case PredApp(x, args):
            if x not in bound:
                acc.append((x, len(args)))
        case Arrow(a, b):
            _pred_arities(a, acc, bound)
            _pred_arities(b, acc, bound)
        case ForallT(_, b) | ExistsT(_, b) | Member(_, b) | Restrict(b, _, _):
            _pred_arities(b, acc, bound)
        case ForallP(x, _, b) | ExistsP(x, _, b):
            _pred_arities(b, acc, bound | {x})
        case RecordTy(fs) | VariantTy(fs):
            for _, a in fs:
                _pred_arities(a, acc, bound)
    return acc


def formula_scoped(f: Formula, dom: Domain, extra_lam=frozenset(), types: TypeTable | None = None) -> str | None:
    """Return a complaint if `f` mentions something outside `dom`."""
    fv = formula_fv(f)
    if bad := fv.lam - dom.lam - extra_lam:
        return f"free λ-variable(s) {sorted(bad)} not in context"
    if bad := fv.term - dom.term:
        return f"free term variable(s) {sorted(bad)} not in context"
    if bad := fv.mu - dom.mu:
        return f"free stack variable(s) {sorted(bad)} not in context"
    if bad := fv.pred - set(dom.pred):
        return f"free predicate variable(s) {sorted(bad)} not in context"
    for x, n in _pred_arities(f):
        if dom.pred.get(x, n) != n:
            return f"predicate {x} used with arity {n}, declared {dom.pred[x]}"
    if types is not None:
        for n in _named(f):
            if n not in types:
                return f"unknown type {n}"
    return None


def _named(f):
    match f:
        case Named(n):
            yield n
        case Arrow(a, b):
            yield from _named(a)
            yield from _named(b)
        case ForallT(_, b) | ExistsT(_, b) | ForallP(_, _, b) | ExistsP(_, _, b) | Member(_, b) | Restrict(b, _, _):
            yield from _named(b)
        case RecordTy(fs) | VariantTy(fs):
            for _, a in fs:
                yield from _named(a)


def _term_scoped(t: Term, dom: Domain) -> str | None:
    fv = free_vars(t)
    if bad := fv.lam - dom.lam:
        return f"free λ-variable(s) {sorted(bad)} not in context"
    if bad := fv.term - dom.term:
        return f"free term variable(s) {sorted(bad)} not in context"
    if bad := fv.mu - dom.mu:
        return f"free stack variable(s) {sorted(bad)} not in context"
    return None


def context_valid(ctx, types: TypeTable | None = None) -> tuple[bool, str | None]:
    """Check the context-formation rules; return (ok, first failure)."""
    lam, mu, term, pred = set(), set(), set(), {}
    for i, e in enumerate(ctx):
        dom = Domain(frozenset(lam), frozenset(mu), frozenset(term), dict(pred))
        match e:
            case LambdaHyp(x, a):
                if x in lam:
                    return False, f"entry {i}: {x} already declared"
                if msg := formula_scoped(a, dom, frozenset([x]), types):
                    return False, f"entry {i} ({x}): {msg}"
                lam.add(x)
            case StackHyp(al, a):
                if al in mu:
                    return False, f"entry {i}: {al} already declared"
                if msg := formula_scoped(a, dom, types=types):
                    return False, f"entry {i} ({al}): {msg}"
                mu.add(al)
            case TermDecl(a):
                if a in term:
                    return False, f"entry {i}: term variable {a} already declared"
                term.add(a)
            case PredDecl(x, n):
                if x in pred:
                    return False, f"entry {i}: predicate variable {x} already declared"
                pred[x] = n
            case EquivHyp(t, u) | InequivHyp(t, u):
                if msg := (_term_scoped(t, dom) or _term_scoped(u, dom)):
                    return False, f"entry {i}: {msg}"
            case _:
                return False, f"entry {i}: not a context entry"
    return True, None


@dataclass(frozen=True)
class Claim:
    lhs: Term
    rhs: Term
    equiv: bool = True  # False for an inequivalence

    def __str__(self):
        return f"{S.pretty(self.lhs)} {'≡' if self.equiv else '≢'} {S.pretty(self.rhs)}"


def restrict_to_equational(ctx) -> tuple:
    """The ≡/≢ hypotheses of a context, in order."""
    out = []
    for e in ctx:
        match e:
            case EquivHyp(t, u):
                out.append(Claim(t, u, True))
            case InequivHyp(t, u):
                out.append(Claim(t, u, False))
    return tuple(out)


def lookup_lambda(ctx, x: str) -> Formula | None:
    for e in reversed(ctx):
        if isinstance(e, LambdaHyp) and e.var == x:
            return e.formula
    return None


def lookup_stack(ctx, al: str) -> Formula | None:
    for e in reversed(ctx):
        if isinstance(e, StackHyp) and e.var == al:
            return e.formula
    return None


# -- pretty printing ---------------------------------------------------------

def pretty_formula(f, ascii_only: bool = False) -> str:
    return _pf(f, 0)


def _pt(t: Term) -> str:
    s = S.pretty(t)
    return f"({s})" if isinstance(t, (S.App, S.Lam, S.Mu, S.Process, S.Rewrite)) and " " in s else s


def _pterm_in_formula(t: Term) -> str:
    return S.pretty(t)


def _pf(f, prec: int) -> str:
    """prec: 0 = top, 1 = left of arrow / quantifier body position, 2 = atom."""
    if is_bot(f):
        return "⊥"
    if is_top(f):
        return "⊤"
    if (pi := as_pi(f)) is not None:
        a, dom, cod = pi
        s = f"Π{a}:{_pf(dom, 2)} {_pf(cod, 1)}"
        return f"({s})" if prec > 1 else s
    match f:
        case PredApp(x, args):
            if not args:
                return x
            return f"{x}({', '.join(_pterm_in_formula(t) for t in args)})"
        case Arrow(Restrict(a, t, u), b) if is_bot(b):
            if is_top(a):
                s = f"{_pterm_in_formula(t)} ≢ {_pterm_in_formula(u)}"
            else:
                s = f"{_pf(a, 2)} ↾ {_pterm_in_formula(t)} ≢ {_pterm_in_formula(u)}"
            return f"({s})" if prec > 0 else s
        case Arrow(a, b):
            s = f"{_pf(a, 2)} ⇒ {_pf(b, 1)}"
            return f"({s})" if prec > 1 else s
        case ForallT(a, b):
            s = f"∀{a} {_pf(b, 1)}"
            return f"({s})" if prec > 1 else s
        case ExistsT(a, b):
            s = f"∃{a} {_pf(b, 1)}"
            return f"({s})" if prec > 1 else s
        case ForallP(x, n, b):
            s = f"∀{x}{_arity(n)} {_pf(b, 1)}"
            return f"({s})" if prec > 1 else s
        case ExistsP(x, n, b):
            s = f"∃{x}{_arity(n)} {_pf(b, 1)}"
            return f"({s})" if prec > 1 else s
        case RecordTy(fs):
            if not fs:
                return "{}"
            return "{" + "; ".join(f"{l} : {_pf(a, 0)}" for l, a in fs) + "}"
        case VariantTy(cs):
            return "[" + " | ".join(f"{c} : {_pf(a, 0)}" for c, a in cs) + "]"
        case Member(t, a):
            s = f"{_pterm_in_formula(t)} ∈ {_pf(a, 2)}"
            return f"({s})" if prec > 0 else s
        case Restrict(a, t, u):
            if is_top(a):
                s = f"{_pterm_in_formula(t)} ≡ {_pterm_in_formula(u)}"
            else:
                s = f"{_pf(a, 2)} ↾ {_pterm_in_formula(t)} ≡ {_pterm_in_formula(u)}"
            return f"({s})" if prec > 0 else s
        case Named(n):
            return n
        case PredicateDef():
            return str(f)
    raise TypeError(f"not a formula: {f!r}")


def _arity(n: int) -> str:
    return "" if n == 0 else ":" + str(n)


def pretty_entry(e: Entry) -> str:
    match e:
        case LambdaHyp(x, a):
            return f"{x} : {pretty_formula(a)}"
        case StackHyp(al, a):
            return f"{al} : ¬{_pf(a, 2)}"
        case TermDecl(a):
            return f"{a} : Term"
        case PredDecl(x, n):
            return f"{x} : Pred{n}"
        case EquivHyp(t, u):
            return f"{S.pretty(t)} ≡ {S.pretty(u)}"
        case InequivHyp(t, u):
            return f"{S.pretty(t)} ≢ {S.pretty(u)}"
    raise TypeError(e)


def pretty_context(ctx) -> str:
    return ", ".join(pretty_entry(e) for e in ctx) if ctx else "•"
