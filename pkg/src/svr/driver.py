"""Module elaboration: check every declaration of a source file in order and
assemble the runtime environment used by `run`.

A typed definition `let f … : T = e` checks `e : T` against the earlier
globals, then enters the context as the hypothesis `f : T` together with the
equation `f ≡ e` when `e` is a value.  An untyped definition enters as a term
variable with its defining equation.  `let rec` items are flagged
`assumes-totality`: the self-hypothesis is trusted, not proved.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from . import formulas as F
from . import syntax as S
from .checker import CheckFailure, Checker, Derivation, derivation_json, derivation_text, validation_error
from .equivalence import DEFAULT_BUDGET, Budget, Proved, Refuted, Unknown, decide, verdict_json
from .machine import Converged, run
from .surface.ast import AssertEquiv, CheckGoal, Diagnostic, LetDef, TTop, TypeDef, ValDecl
from .surface.desugar import DesugarError, Scope, desugar_expr, desugar_type
from .surface.parser import ParseError, parse_expr, parse_module

OK, FAILED, ASSUMES_TOTALITY = "ok", "failed", "assumes-totality"

# Z = λg (λx g (λv x x v)) (λx g (λv x x v)), a call-by-value fixpoint combinator
_W = S.Lam("x", S.App(S.Var("g"), S.Lam("v", S.App(S.App(S.Var("x"), S.Var("x")), S.Var("v")))))
FIX = S.Lam("g", S.App(_W, _W))


def fixpoint(f: S.Value) -> S.Value:
    """A value behaving as the least fixpoint of the functional `f`."""
    return S.Lam("v", S.App(S.App(FIX, f), S.Var("v")))


@dataclass
class Item:
    kind: str
    name: str
    line: int
    status: str = OK
    message: str = ""
    derivation: Derivation | None = None
    verdict: object = None
    failure: CheckFailure | None = None
    notes: list = field(default_factory=list)

    def to_json(self, derivations: bool = False) -> dict:
        d = {"kind": self.kind, "name": self.name, "line": self.line, "status": self.status}
        if self.message:
            d["message"] = self.message
        if self.notes:
            d["notes"] = list(self.notes)
        if self.failure is not None:
            d["failure"] = self.failure.to_json()
        if self.verdict is not None:
            d.update(verdict_json(self.verdict))
        if derivations and self.derivation is not None:
            d["derivation"] = derivation_json(self.derivation)
        return d

    def summary(self) -> str:
        s = f"{self.kind} {self.name}: {self.status}"
        if self.message:
            s += f" ({self.message})"
        return s


@dataclass
class Global:
    name: str
    kind: str          # "lam" (typed, a λ-variable) or "term" (untyped)
    body: S.Term | None
    rec: bool = False


@dataclass
class Elaboration:
    items: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    ctx: tuple = ()
    types: F.TypeTable = field(default_factory=F.TypeTable)
    scope: Scope = field(default_factory=Scope)
    globals: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.diagnostics and all(i.status in (OK, ASSUMES_TOTALITY) for i in self.items)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    @property
    def equational(self) -> tuple:
        return F.restrict_to_equational(self.ctx)


def _diag(e, line=0) -> Diagnostic:
    if isinstance(e, DesugarError):
        return e.diagnostic
    return Diagnostic("error", line, 1, 0, 0, str(e))


def elaborate(source: str, budget: Budget = DEFAULT_BUDGET) -> Elaboration:
    start = time.perf_counter()
    with S.fresh_names():
        el = _Elaborator(budget)
        module, diags = parse_module(source)
        el.out.diagnostics.extend(diags)
        for d in module.decls:
            el.decl(d)
    el.out.seconds = time.perf_counter() - start
    return el.out


class _Elaborator:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.out = Elaboration()
        self.checker = Checker(self.out.types, budget)

    @property
    def scope(self) -> Scope:
        return self.out.scope

    def extend(self, *entries):
        self.out.ctx = self.out.ctx + tuple(entries)

    def defined(self, name) -> bool:
        return name in self.out.globals or name in self.out.types

    def decl(self, d):
        line = d.span.line
        name = getattr(d, "name", "")
        if isinstance(d, (TypeDef, LetDef, ValDecl)) and self.defined(name):
            self.out.diagnostics.append(
                Diagnostic("error", line, d.span.col, d.span.start, d.span.end, f"{name} is already defined"))
            return
        try:
            if isinstance(d, TypeDef):
                self.type_def(d)
            elif isinstance(d, LetDef):
                self.let_def(d)
            elif isinstance(d, AssertEquiv):
                self.assertion(d)
            elif isinstance(d, CheckGoal):
                self.check_goal(d)
            elif isinstance(d, ValDecl):
                self.val_decl(d)
        except DesugarError as e:
            if not e.span.line:
                e.span = d.span
            self.out.diagnostics.append(e.diagnostic)
            self.out.items.append(Item(type(d).__name__, name, line, FAILED, str(e)))

    def type_def(self, d: TypeDef):
        sc = self.scope.with_type(d.name)
        body = desugar_type(d.body, sc)
        try:
            self.out.types.add(d.name, body)
        except ValueError as e:
            raise DesugarError(str(e), d.span) from None
        self.out.scope = sc
        self.out.items.append(Item("type", d.name, d.span.line))

    def let_def(self, d: LetDef):
        item = Item("let", d.name, d.span.line)
        self.out.items.append(item)
        kind = "lam" if d.annotated else "term"
        body_scope = self.scope.with_global(d.name, kind) if d.rec else self.scope
        for p in d.params:
            body_scope = body_scope.bind_lam(p.name)
        body = desugar_expr(d.body, body_scope)
        for p in reversed(d.params):
            body = S.Lam(p.name, body)
        if d.rec:
            item.status = ASSUMES_TOTALITY
            item.notes.append("recursive definition: termination is assumed, not proved")

        if not d.annotated:
            self.extend(F.TermDecl(d.name), F.EquivHyp(S.TVar(d.name), body))
            ok, msg = F.context_valid(self.out.ctx, self.out.types)
            if not ok:
                raise DesugarError(msg or "invalid definition", d.span)
            self._register(d.name, "term", body, d.rec)
            return

        T = self.telescope(d)
        check_ctx = self.out.ctx + ((F.LambdaHyp(d.name, T),) if d.rec else ())
        try:
            der = self.checker.check_term(check_ctx, body, T)
        except CheckFailure as e:
            item.status, item.failure, item.message = FAILED, e, e.message()
            self.extend(F.LambdaHyp(d.name, T))
            self._register(d.name, "lam", body, d.rec)
            return
        err = validation_error(der, self.out.types, self.budget)
        if err is not None:
            item.status, item.message = FAILED, f"derivation rejected by the validator: {err}"
        item.derivation = der
        elaborated = S.erase_hints(der.subject)
        self.extend(F.LambdaHyp(d.name, T))
        if S.is_value(elaborated):
            self.extend(F.EquivHyp(S.Var(d.name), elaborated))
        self._register(d.name, "lam", elaborated, d.rec)

    def telescope(self, d: LetDef) -> F.Formula:
        sc = self.scope.with_global(d.name, "lam") if d.rec else self.scope
        doms = []
        for p in d.params:
            doms.append((p.name, desugar_type(p.type or TTop(p.span), sc)))
            sc = sc.bind_term(p.name)
        T = desugar_type(d.result, sc) if d.result is not None else F.TOP
        for x, dom in reversed(doms):
            T = F.sugar_pi(x, dom, T)
        return T

    def _register(self, name, kind, body, rec):
        self.out.globals[name] = Global(name, kind, body, rec)
        self.out.scope = self.scope.with_global(name, kind)

    def assertion(self, d: AssertEquiv):
        lhs, rhs = desugar_expr(d.lhs, self.scope), desugar_expr(d.rhs, self.scope)
        rel = "≡" if d.equal else "≢"
        name = f"{S.pretty(lhs)} {rel} {S.pretty(rhs)}"
        v = decide(self.out.equational, lhs, rhs, d.equal, self.budget)
        item = Item("assert", name, d.span.line, verdict=v)
        if isinstance(v, Refuted):
            item.status, item.message = FAILED, "refuted"
        elif isinstance(v, Unknown):
            item.status, item.message = FAILED, f"unknown: {v.reason}"
        self.out.items.append(item)

    def check_goal(self, d: CheckGoal):
        subject = self.scope.resolve(d.name, d.span)
        T = desugar_type(d.type, self.scope)
        item = Item("check", d.name, d.span.line)
        try:
            item.derivation = self.checker.check_term(self.out.ctx, subject, T)
        except CheckFailure as e:
            item.status, item.failure, item.message = FAILED, e, e.message()
        self.out.items.append(item)

    def val_decl(self, d: ValDecl):
        T = desugar_type(d.type, self.scope)
        self.extend(F.LambdaHyp(d.name, T))
        ok, msg = F.context_valid(self.out.ctx, self.out.types)
        if not ok:
            self.out.ctx = self.out.ctx[:-1]
            raise DesugarError(msg or "invalid declaration", d.span)
        self._register(d.name, "lam", None, False)
        self.out.items.append(Item("val", d.name, d.span.line, notes=["assumed without definition"]))


# -- running -----------------------------------------------------------------

class RuntimeError_(Exception):
    pass


def runtime_term(el: Elaboration, name: str, fuel: int = 100_000) -> S.Term:
    """The closed term a global denotes at runtime."""
    cache: dict = {}

    def get(n, active=()):
        if n in cache:
            return cache[n]
        if n in active:
            raise RuntimeError_(f"{n} depends on itself without `rec`")
        g = el.globals.get(n)
        if g is None:
            raise RuntimeError_(f"unknown definition {n}")
        if g.body is None:
            raise RuntimeError_(f"{n} is declared with `val` and has no definition")
        body = S.erase_hints(g.body)
        self_var = None
        if g.rec:
            self_var = S.fresh("self")
            body = S.subst_many(body, lam={n: S.Var(self_var)}, term={n: S.Var(self_var)})
        fv = S.free_vars(body)
        lam = {x: get(x, active + (n,)) for x in fv.lam if x != self_var}
        term = {x: get(x, active + (n,)) for x in fv.term}
        closed = S.subst_many(body, lam=lam, term=term)
        if g.rec:
            closed = fixpoint(S.Lam(self_var, closed))
        if g.kind == "lam" and not S.is_value(closed):
            out = run(S.Process(closed, S.SVar("α")), fuel)
            if not isinstance(out, Converged):
                raise RuntimeError_(f"{n} did not evaluate to a value")
            closed = out.value
        cache[n] = closed
        return closed

    return get(name)


def parse_in_scope(el: Elaboration, text: str) -> S.Term:
    """Parse an expression in the module's scope; unknown lowercase names
    become free λ-variables."""
    return desugar_expr(parse_expr(text), replace(el.scope, open=True))
