"""Translate surface trees to core terms and formulas.

Name resolution: λ-, let- and pattern-bound names become λ-variables;
names bound by `∀a`, `∃a` or `Π a:A` become term variables; top-level
definitions resolve to whatever the driver registered for them.  Non-values
in value positions are let-bound first, e.g. `C[t]` becomes `(λx C[x]) t`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .. import formulas as F
from .. import syntax as S
from .ast import (
    Diagnostic, EAnnot, EApp, ECtor, EDelta, EInst, ELam, ELet, EMatch, EMu, EProj,
    ERecord, ERestart, ERewrite, EScissors, EUnitProbe, EVar, KFrame, KPush, KVar,
    NOSPAN, PredWitness, Span, TArrow, TBot, TEquation, TMember, TName, TPi, TPredApp,
    TQuant, TRecord, TRestrict, TTop, TVariant,
)


class DesugarError(Exception):
    def __init__(self, message: str, span: Span = NOSPAN):
        super().__init__(message)
        self.span = span

    @property
    def diagnostic(self) -> Diagnostic:
        s = self.span
        return Diagnostic("error", s.line, s.col, s.start, s.end, str(self))


@dataclass(frozen=True)
class Scope:
    lam: frozenset = frozenset()
    term: frozenset = frozenset()
    stack: frozenset = frozenset()
    preds: tuple = ()              # ((name, arity), ...), innermost last
    types: frozenset = frozenset()
    globals: tuple = ()            # ((name, "lam" | "term"), ...)
    open: bool = False             # unresolved names are free variables
    open_term: frozenset = field(default=frozenset())

    @classmethod
    def opened(cls, term_vars=frozenset(), types=frozenset()):
        return cls(types=frozenset(types), open=True, open_term=frozenset(term_vars))

    def bind_lam(self, x):
        return replace(self, lam=self.lam | {x}, term=self.term - {x})

    def bind_term(self, a):
        return replace(self, term=self.term | {a}, lam=self.lam - {a})

    def bind_stack(self, a):
        return replace(self, stack=self.stack | {a})

    def bind_pred(self, x, n):
        return replace(self, preds=self.preds + ((x, n),))

    def pred_arity(self, x):
        for name, n in reversed(self.preds):
            if name == x:
                return n
        return None

    def with_global(self, name, kind):
        return replace(self, globals=tuple(g for g in self.globals if g[0] != name) + ((name, kind),))

    def with_type(self, name):
        return replace(self, types=self.types | {name})

    def resolve(self, x, span=NOSPAN) -> S.Term:
        if x in self.lam:
            return S.Var(x)
        if x in self.term:
            return S.TVar(x)
        for name, kind in reversed(self.globals):
            if name == x:
                return S.Var(x) if kind == "lam" else S.TVar(x)
        if self.open:
            return S.TVar(x) if x in self.open_term else S.Var(x)
        raise DesugarError(f"unbound name {x}", span)


def _bind(t: S.Term, k, literal: bool, span: Span, what: str):
    if S.is_value(t):
        return k(t)
    if literal:
        raise DesugarError(f"{what} needs a value here", span)
    x = S.fresh("x")
    return S.App(S.Lam(x, k(S.Var(x))), t)


def desugar_expr(e, scope: Scope, literal: bool = False) -> S.Term:
    def go(e, sc):
        return desugar_expr(e, sc, literal)

    match e:
        case EVar(x):
            return scope.resolve(x, e.span)
        case ELam(params, body):
            sc = scope
            for x in params:
                sc = sc.bind_lam(x)
            t = go(body, sc)
            for x in reversed(params):
                t = S.Lam(x, t)
            return t
        case EMu(a, body):
            return S.Mu(a, go(body, scope.bind_stack(a)))
        case EApp(f, a):
            return S.App(go(f, scope), go(a, scope))
        case ECtor(c, None):
            return S.Ctor(c, S.UNIT)
        case ECtor(c, arg):
            return _bind(go(arg, scope), lambda v: S.Ctor(c, v), literal, e.span, f"constructor {c}")
        case ERecord(fields):
            terms = [(l, go(x, scope)) for l, x in fields]

            def build(i, acc):
                if i == len(terms):
                    return S.Record(tuple(acc))
                l, t = terms[i]
                return _bind(t, lambda v: build(i + 1, acc + [(l, v)]), literal, e.span, "record field")
            return build(0, [])
        case EProj(x, l):
            return _bind(go(x, scope), lambda v: S.Proj(v, l), literal, e.span, "projection")
        case EMatch(scrut, arms):
            seen = set()
            branches = []
            for arm in arms:
                if arm.ctor in seen:
                    raise DesugarError(f"duplicate pattern {arm.ctor}", arm.span)
                seen.add(arm.ctor)
                x = arm.var if arm.var is not None else S.fresh("u")
                branches.append((arm.ctor, x, go(arm.body, scope.bind_lam(x))))
            return _bind(go(scrut, scope), lambda v: S.Case(v, tuple(branches)), literal, e.span, "match")
        case ELet(x, bound, body):
            return S.App(S.Lam(x, go(body, scope.bind_lam(x))), go(bound, scope))
        case EScissors():
            return S.Scissors()
        case EAnnot(x, ty):
            return S.Annot(go(x, scope), desugar_type(ty, scope, literal))
        case EInst(x, w):
            return S.Inst(go(x, scope), _witness(w, scope, literal))
        case ERewrite(h, body):
            if h not in scope.lam and not scope.open and (h, "lam") not in scope.globals:
                raise DesugarError(f"rewrite needs a hypothesis name, {h} is not one", e.span)
            return S.Rewrite(h, go(body, scope))
        case ERestart(x, pi):
            return S.Process(go(x, scope), desugar_stack(pi, scope, literal))
        case EDelta(a, b):
            ta, tb = go(a, scope), go(b, scope)
            return _bind(ta, lambda v: _bind(tb, lambda w: S.Delta(v, w), literal, e.span, "δ"),
                         literal, e.span, "δ")
        case EUnitProbe(a):
            return _bind(go(a, scope), S.Unit, literal, e.span, "unit")
    raise TypeError(f"not an expression: {e!r}")


def desugar_stack(pi, scope: Scope, literal: bool = False) -> S.Stack:
    match pi:
        case KVar(a):
            if a not in scope.stack and not scope.open:
                raise DesugarError(f"unbound stack variable {a}", pi.span)
            return S.SVar(a)
        case KPush(v, rest):
            tv = desugar_expr(v, scope, literal)
            if not S.is_value(tv):
                raise DesugarError("only values can be pushed on a stack", pi.span)
            return S.Push(tv, desugar_stack(rest, scope, literal))
        case KFrame(t, rest):
            return S.Frame(desugar_expr(t, scope, literal), desugar_stack(rest, scope, literal))
    raise TypeError(pi)


def _witness(w, scope: Scope, literal: bool):
    if isinstance(w, PredWitness):
        sc = scope
        for a in w.params:
            sc = sc.bind_term(a)
        return F.PredicateDef(tuple(w.params), desugar_type(w.body, sc, literal))
    if isinstance(w, EVar) and (w.name in scope.types or scope.pred_arity(w.name) is not None):
        return F.PredicateDef((), desugar_type(TName(w.name, w.span), scope, literal))
    return desugar_expr(w, scope, literal)


def _pred_uses(ty, x) -> int | None:
    """Arity of the first use of predicate variable `x` in a surface type."""
    match ty:
        case TPredApp(n, args):
            return len(args) if n == x else None
        case TName(n):
            return 0 if n == x else None
        case TQuant(_, v, _, body):
            return None if v == x else _pred_uses(body, x)
        case TArrow(a, b) | TPi(_, a, b):
            r = _pred_uses(a, x)
            return r if r is not None else _pred_uses(b, x)
        case TMember(_, a) | TRestrict(a, _, _, _):
            return _pred_uses(a, x)
        case TRecord(fs) | TVariant(fs):
            for _, a in fs:
                if a is not None and (r := _pred_uses(a, x)) is not None:
                    return r
    return None


def desugar_type(ty, scope: Scope, literal: bool = False) -> F.Formula:
    def go(t, sc=scope):
        return desugar_type(t, sc, literal)

    def term(e, sc=scope):
        return desugar_expr(e, sc, literal)

    match ty:
        case TName(n):
            ar = scope.pred_arity(n)
            if ar is not None:
                if ar != 0:
                    raise DesugarError(f"predicate variable {n} expects {ar} arguments", ty.span)
                return F.PredApp(n)
            if n in scope.types or scope.open:
                return F.Named(n)
            raise DesugarError(f"unknown type {n}", ty.span)
        case TPredApp(n, args):
            ar = scope.pred_arity(n)
            if ar is None and not scope.open:
                raise DesugarError(f"unbound predicate variable {n}", ty.span)
            if ar is not None and ar != len(args):
                raise DesugarError(f"predicate variable {n} expects {ar} arguments", ty.span)
            return F.PredApp(n, tuple(term(a) for a in args))
        case TArrow(a, b):
            return F.Arrow(go(a), go(b))
        case TQuant(q, v, arity, body):
            if v[0].isupper():
                n = arity if arity is not None else (_pred_uses(body, v) or 0)
                b = go(body, scope.bind_pred(v, n))
                return F.ForallP(v, n, b) if q == "∀" else F.ExistsP(v, n, b)
            if arity is not None:
                raise DesugarError("only predicate variables take an arity", ty.span)
            b = go(body, scope.bind_term(v))
            return F.ForallT(v, b) if q == "∀" else F.ExistsT(v, b)
        case TPi(v, dom, body):
            return F.sugar_pi(v, go(dom), go(body, scope.bind_term(v)))
        case TEquation(l, r, eq):
            f = F.sugar_equation if eq else F.sugar_inequation
            return f(term(l), term(r))
        case TMember(e, a):
            return F.Member(term(e), go(a))
        case TRestrict(a, l, r, eq):
            if eq:
                return F.Restrict(go(a), term(l), term(r))
            return F.sugar_restrict_neq(go(a), term(l), term(r))
        case TRecord(fs):
            labels = [l for l, _ in fs]
            if len(set(labels)) != len(labels):
                raise DesugarError("duplicate field label in record type", ty.span)
            return F.RecordTy(tuple((l, go(a)) for l, a in fs))
        case TVariant(cs):
            names = [c for c, _ in cs]
            if len(set(names)) != len(names):
                raise DesugarError("duplicate constructor in variant type", ty.span)
            return F.VariantTy(tuple((c, F.RecordTy(()) if a is None else go(a)) for c, a in cs))
        case TTop():
            return F.TOP
        case TBot():
            return F.BOT
    raise TypeError(f"not a type: {ty!r}")
