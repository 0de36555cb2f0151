"""Bidirectional checker producing replayable derivations.

Judgements come in two kinds: "value" (⊩, subject a syntactic value) and
"term" (⊢).  Each `Derivation` node is tagged with the rule it instantiates
and carries the side evidence needed to re-check it (fresh variables,
witnesses, equivalence certificates).  `validate` re-checks a derivation
node by node without trusting the checker.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from . import equivalence as EQ
from . import formulas as F
from . import syntax as S
from .equivalence import Budget, DEFAULT_BUDGET, Proved
from .formulas import (
    Arrow, EquivHyp, ExistsP, ExistsT, ForallP, ForallT, Formula, InequivHyp,
    LambdaHyp, Member, Named, PredApp, PredDecl, PredVar, PredicateDef,
    RecordTy, Restrict, StackHyp, TermDecl, TypeTable, VariantTy,
    formula_alpha_eq, formula_fv, formula_subst, restrict_to_equational,
)
from .syntax import (
    UNIT, Annot, App, Case, Ctor, Inst, Lam, Mu, Process, Proj, Record,
    Rewrite, SVar, Scissors, TVar, Term, Value, Var, alpha_eq, fresh, pretty,
)

VALUE, TERM = "value", "term"

# rule tags
AX, UP, DOWN = "ax", "↑", "↓"
IMP_E, IMP_I, MU, STAR = "⇒ₑ", "⇒ᵢ", "μ", "∗"
MEM_I, MEM_E, RES_I, RES_E = "∈ᵢ", "∈ₑ", "↾ᵢ", "↾ₑ"
ALL_I, ALL_E, EX_E, EX_I = "∀ᵢ", "∀ₑ", "∃ₑ", "∃ᵢ"
PALL_I, PALL_E, PEX_E, PEX_I = "∀_I", "∀_E", "∃_E", "∃_I"
REC_I, REC_E, SUM_I, SUM_E = "×ᵢ", "×ₑ", "+ᵢ", "+ₑ"
EQ_VL, EQ_TL, EQ_VR, EQ_TR = "≡ᵥₗ", "≡ₜₗ", "≡ᵥᵣ", "≡ₜᵣ"
DISCHARGE_EQ, DISCHARGE_NEQ, SCISSORS = "≡", "≢", "✂"
MACRO_ALL_I, MACRO_PI_E = "∀ᵢ,≡", "Πₑ,≡"
FOLD, UNFOLD, UNIT_ETA = "fold", "unfold", "×η"

MACROS = frozenset({MACRO_ALL_I, MACRO_PI_E})
PRIMITIVE = frozenset({
    AX, UP, DOWN, IMP_E, IMP_I, MU, STAR, MEM_I, MEM_E, RES_I, RES_E, ALL_I,
    ALL_E, EX_E, EX_I, PALL_I, PALL_E, PEX_E, PEX_I, REC_I, REC_E, SUM_I,
    SUM_E, EQ_VL, EQ_TL, EQ_VR, EQ_TR, DISCHARGE_EQ, DISCHARGE_NEQ, SCISSORS,
    FOLD, UNFOLD, UNIT_ETA,
})

REASONS = ("rule mismatch", "freshness violation", "equivalence Unknown",
           "context invalid", "annotation needed")


@dataclass(frozen=True, eq=False)
class Judgement:
    kind: str
    ctx: tuple
    subject: Term
    formula: Formula

    def __str__(self):
        turn = "⊩" if self.kind == VALUE else "⊢"
        return f"{F.pretty_context(self.ctx)} {turn} {pretty(self.subject)} : {F.pretty_formula(self.formula)}"


@dataclass(frozen=True, eq=False)
class Derivation:
    rule: str
    conclusion: Judgement
    premises: tuple = ()
    side: dict = field(default_factory=dict)

    @property
    def subject(self):
        return self.conclusion.subject

    @property
    def formula(self):
        return self.conclusion.formula

    @property
    def ctx(self):
        return self.conclusion.ctx

    @property
    def kind(self):
        return self.conclusion.kind

    def nodes(self):
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def rules(self) -> list[str]:
        return [d.rule for d in self.nodes()]

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


class CheckFailure(Exception):
    def __init__(self, judgement: Judgement | None, reason: str, detail: str = "",
                 claim: F.Claim | None = None, sub: "CheckFailure | None" = None):
        assert reason in REASONS, reason
        self.judgement = judgement
        self.reason = reason
        self.detail = detail
        self.claim = claim
        self.sub = sub
        super().__init__(self.message())

    def message(self) -> str:
        msg = self.reason
        if self.detail:
            msg += f": {self.detail}"
        if self.claim is not None:
            msg += f" [claim {self.claim}]"
        return msg

    def to_json(self) -> dict:
        d = {"reason": self.reason, "detail": self.detail}
        if self.judgement is not None:
            d["judgement"] = str(self.judgement)
        if self.claim is not None:
            d["claim"] = str(self.claim)
        if self.sub is not None:
            d["sub"] = self.sub.to_json()
        return d


def _node(rule, kind, ctx, subject, formula, premises=(), **side) -> Derivation:
    return Derivation(rule, Judgement(kind, tuple(ctx), subject, formula), tuple(premises), side)


def _dom(ctx) -> F.Domain:
    return F.domain(ctx)


def _has_equation(ctx, a, b, cls=EquivHyp) -> bool:
    ka, kb = S.alpha_key(a), S.alpha_key(b)
    for e in ctx:
        if isinstance(e, cls):
            k1, k2 = S.alpha_key(e.lhs), S.alpha_key(e.rhs)
            if (k1, k2) in ((ka, kb), (kb, ka)):
                return True
    return False


def _fresh_term_var(base: str, ctx, avoid=frozenset()) -> str:
    fv = F.context_fv(ctx)
    taken = fv.term | _dom(ctx).term | avoid
    return base if base not in taken else fresh(base)


def _rename_params(n: int):
    return tuple(f"p{i}" for i in range(n))


def _pred_renaming(new: str, n: int) -> PredicateDef:
    ps = _rename_params(n)
    return PredicateDef(ps, PredApp(new, tuple(TVar(p) for p in ps)))


# -- the checker -------------------------------------------------------------

class Checker:
    def __init__(self, types: TypeTable | None = None, budget: Budget = DEFAULT_BUDGET):
        self.types = types or TypeTable()
        self.budget = budget

    # public entry points
    def check_value(self, ctx, v: Value, A: Formula) -> Derivation:
        self._valid(ctx, v, A, VALUE)
        return self._check_value(tuple(ctx), v, A)

    def check_term(self, ctx, t: Term, A: Formula) -> Derivation:
        self._valid(ctx, t, A, TERM)
        return self._check_term(tuple(ctx), t, A)

    def _valid(self, ctx, t, A, kind):
        ok, msg = F.context_valid(ctx, self.types)
        if not ok:
            raise CheckFailure(Judgement(kind, tuple(ctx), t, A), "context invalid", msg or "")

    def _fail(self, kind, ctx, t, A, reason, detail="", claim=None, sub=None):
        raise CheckFailure(Judgement(kind, tuple(ctx), t, A), reason, detail, claim, sub)

    def _E(self, ctx):
        return restrict_to_equational(ctx)

    # -- term judgements ---------------------------------------------------
    def _check_term(self, ctx, t, A) -> Derivation:
        if isinstance(t, Annot):
            d = self._check_term(ctx, t.term, t.formula)
            return self._subsume(ctx, d, A)
        if isinstance(t, Scissors):
            return self._scissors(ctx, A)
        if isinstance(t, Rewrite):
            return self._rewrite(ctx, t, A)
        structural = isinstance(t, (Case, Mu, Process)) or (isinstance(t, App) and isinstance(t.fn, Lam))
        if isinstance(A, Restrict) and not structural:
            if not isinstance(t, Value) and self._synthesizable(t):
                try:
                    d = self._synth_term(ctx, t)
                    if formula_alpha_eq(d.formula, A):
                        return d
                except CheckFailure:
                    pass
            return self._restrict_intro(ctx, t, A)
        if isinstance(A, (ExistsT, ExistsP)):
            return self._exists_intro(ctx, t, A)
        if isinstance(A, Member) and isinstance(t, Value) and not alpha_eq(t, A.term):
            return self._member_by_equation(ctx, t, A)
        if isinstance(t, Value):
            return _up(self._check_value(ctx, t, A))
        if isinstance(A, ForallT):
            return self._forall_intro_equiv(ctx, t, A)
        match t:
            case Case():
                return self._sum_elim(ctx, t, A)
            case Mu(alpha, body):
                a2 = alpha if alpha not in _dom(ctx).mu else fresh(alpha)
                if a2 != alpha:
                    body = S.subst(body, SVar(alpha), SVar(a2))
                d = self._check_term(ctx + (StackHyp(a2, A),), body, A)
                return _node(MU, TERM, ctx, Mu(a2, d.subject), A, [d])
            case Process(u, pi):
                if not isinstance(pi, SVar):
                    self._fail(TERM, ctx, t, A, "rule mismatch", "only `t ∗ α` can be typed")
                H = F.lookup_stack(ctx, pi.name)
                if H is None:
                    self._fail(TERM, ctx, t, A, "rule mismatch", f"no hypothesis for stack variable {pi.name}")
                d = self._check_term(ctx, u, H)
                return _node(STAR, TERM, ctx, Process(d.subject, pi), A, [d])
            case App(Lam() as f, u):
                return self._check_redex(ctx, f, u, A)
            case Proj(Record() as v, l) if v.get(l) is not None:
                d = self._check_projection(ctx, v, l, A)
                if d is not None:
                    return d
            case Inst(u, w) if isinstance(A, (ExistsT, ExistsP)):
                return self._exists_intro(ctx, t, A)
        if isinstance(A, ForallP) and not self._synthesizable(t):
            self._fail(TERM, ctx, t, A, "rule mismatch", "predicate quantifiers are introduced on values only")
        d = self._synth_term(ctx, t)
        return self._subsume(ctx, d, A)

    def _check_redex(self, ctx, f: Lam, u, A) -> Derivation:
        """`(λx t) u` against A.  The argument's synthesized type comes first;
        when it is too precise for the body (`Z[]` has `[Z : {}]`, not
        `nat`), each declared type that accepts `u` is tried in turn."""
        def attempt(du):
            df = _up(self._check_value(ctx, f, Arrow(du.formula, A)))
            return _node(IMP_E, TERM, ctx, App(df.subject, du.subject), A, [df, du])

        try:
            return attempt(self._synth_term(ctx, u))
        except CheckFailure as first:
            failure = first
        for name in self.types.defs:
            try:
                du = self._check_term(ctx, u, Named(name))
            except CheckFailure:
                continue
            try:
                return attempt(du)
            except CheckFailure:
                pass
        raise failure

    def _check_projection(self, ctx, v: Record, l: str, A) -> Derivation | None:
        """`{… l = w …}.l` against A: the literal is checked at a record type
        whose field l is A, other fields keeping their synthesized types."""
        fields = []
        for k, w in v.fields:
            if k == l:
                fields.append((k, A))
                continue
            try:
                fields.append((k, self._synth_value(ctx, w).formula))
            except CheckFailure:
                return None
        dv = self._check_value(ctx, v, RecordTy(tuple(fields)))
        return _node(REC_E, TERM, ctx, Proj(dv.subject, l), A, [dv])

    def _synthesizable(self, t) -> bool:
        return isinstance(t, (Var, App, Proj, Inst, Annot))

    def _subsume(self, ctx, d: Derivation, A) -> Derivation:
        R = d.formula
        if formula_alpha_eq(R, A):
            return d
        if F.is_top(A):
            return _node(PEX_I, TERM, ctx, d.subject, A, [d], var=A.var, witness=PredicateDef((), R))
        if isinstance(R, Named) and R.name in self.types:
            return self._subsume(ctx, self._unfold(d), A)
        if isinstance(A, Named) and A.name in self.types:
            d2 = self._subsume(ctx, d, self.types.defs[A.name])
            return _node(FOLD, d2.kind, ctx, d2.subject, A, [d2], name=A.name)
        if isinstance(A, Restrict):
            # A ↾ u₁ ≡ u₂ from a derivation at A: weaken by the equation
            def k(ctx2):
                d2 = self._subsume(ctx2, weaken(d, len(ctx), (EquivHyp(A.lhs, A.rhs),)), A.formula)
                return _node(RES_I, TERM, ctx2, d2.subject, A, [d2])
            return self._with_equation(ctx, A.lhs, A.rhs, k, d.subject, A)
        self._fail(TERM, ctx, d.subject, A, "rule mismatch",
                   f"expected {F.pretty_formula(A)}, found {F.pretty_formula(R)}")

    def _unfold(self, d: Derivation) -> Derivation:
        name = d.formula.name
        return _node(UNFOLD, d.kind, d.ctx, d.subject, self.types.defs[name], [d], name=name)

    def _unfold_head(self, d: Derivation) -> Derivation:
        seen = set()
        while isinstance(d.formula, Named) and d.formula.name in self.types and d.formula.name not in seen:
            seen.add(d.formula.name)
            d = self._unfold(d)
        return d

    def _with_equation(self, ctx, u1, u2, k: Callable, subject, A, polarity=True) -> Derivation:
        cls = EquivHyp if polarity else InequivHyp
        if _has_equation(ctx, u1, u2, cls):
            return k(ctx)
        verdict = EQ.decide(self._E(ctx), u1, u2, polarity, self.budget)
        claim = F.Claim(S.erase_hints(u1), S.erase_hints(u2), polarity)
        if not isinstance(verdict, Proved):
            why = "refuted" if isinstance(verdict, EQ.Refuted) else "not provable"
            self._fail(TERM, ctx, subject, A, "equivalence Unknown", f"claim {why} from the context", claim)
        ctx2 = ctx + (cls(claim.lhs, claim.rhs),)
        d = k(ctx2)
        rule = DISCHARGE_EQ if polarity else DISCHARGE_NEQ
        return _node(rule, TERM, ctx, d.subject, d.formula, [d], lhs=claim.lhs, rhs=claim.rhs,
                     certificate=verdict.certificate)

    def _restrict_intro(self, ctx, t, A: Restrict) -> Derivation:
        def k(ctx2):
            d = self._check_term(ctx2, t, A.formula)
            return _node(RES_I, TERM, ctx2, d.subject, A, [d])
        if isinstance(t, Scissors):
            ok = self._contradictory(ctx)
            if ok is not None:
                return self._scissors_bot(ctx, A, ok)
        return self._with_equation(ctx, A.lhs, A.rhs, k, t, A)

    def _contradictory(self, ctx):
        v = EQ.context_contradictory(self._E(ctx), self.budget)
        return v if isinstance(v, Proved) else None

    def _scissors_bot(self, ctx, A, verdict) -> Derivation:
        d = _up(_node(SCISSORS, VALUE, ctx, S.Scissors(), F.BOT, certificate=verdict.certificate))
        if F.is_bot(A):
            return d
        return _node(PALL_E, TERM, ctx, d.subject, A, [d], var=F.BOT.var, witness=PredicateDef((), A))

    def _scissors(self, ctx, A) -> Derivation:
        ok = self._contradictory(ctx)
        if ok is not None:
            return self._scissors_bot(ctx, A, ok)
        if isinstance(A, Restrict):
            return self._restrict_intro(ctx, S.Scissors(), A)
        if F.is_top(A):
            d = _up(_node(REC_I, VALUE, ctx, UNIT, RecordTy(())))
            return _node(PEX_I, TERM, ctx, UNIT, A, [d], var=A.var, witness=PredicateDef((), RecordTy(())))
        self._fail(TERM, ctx, S.Scissors(), A, "rule mismatch",
                   "✂ needs a contradictory context or an equation goal")

    def _exists_intro(self, ctx, t, A) -> Derivation:
        if isinstance(t, Inst):
            w = t.witness
            if isinstance(A, ExistsT) and isinstance(w, Term):
                w = S.erase_hints(w)
                d = self._check_term(ctx, t.term, formula_subst(A.body, TVar(A.var), w))
                return _node(EX_I, TERM, ctx, d.subject, A, [d], var=A.var, witness=w)
            if isinstance(A, ExistsP) and isinstance(w, PredicateDef) and w.arity == A.arity:
                d = self._check_term(ctx, t.term, formula_subst(A.body, PredVar(A.var, A.arity), w))
                return _node(PEX_I, TERM, ctx, d.subject, A, [d], var=A.var, witness=w)
        if F.is_top(A):
            try:
                d = self._synth_term(ctx, t)
            except CheckFailure as e:
                self._fail(TERM, ctx, t, A, "annotation needed", "cannot find a type to witness ⊤", sub=e)
            return self._subsume(ctx, d, A)
        if self._synthesizable(t):
            d = self._synth_term(ctx, t)
            return self._subsume(ctx, d, A)
        self._fail(TERM, ctx, t, A, "annotation needed", "existential needs a witness `t{w}`")

    def _member_by_equation(self, ctx, v, A: Member) -> Derivation:
        def k(ctx2):
            d = _up(self._check_value(ctx2, v, Member(v, A.formula)))
            b = fresh("b")
            return _node(EQ_TR, TERM, ctx2, d.subject, A, [d], template=Member(TVar(b), A.formula),
                         var=b, t1=v, t2=A.term)
        return self._with_equation(ctx, v, A.term, k, v, A)

    def _sum_elim(self, ctx, t: Case, B) -> Derivation:
        """Case analysis.  The scrutinee's synthesized type comes first; if
        it is too precise for the branches, each declared type that accepts
        the scrutinee is tried in turn."""
        try:
            return self._sum_elim_at(ctx, t, B, self._synth_value(ctx, t.value))
        except CheckFailure as first:
            failure = first
        for name in self.types.defs:
            try:
                dv = self._check_value(ctx, t.value, Named(name))
            except CheckFailure:
                continue
            try:
                return self._sum_elim_at(ctx, t, B, dv)
            except CheckFailure:
                pass
        raise failure

    def _sum_elim_at(self, ctx, t: Case, B, dv: Derivation) -> Derivation:
        dv = self._unfold_head(dv)
        V = dv.formula
        if not isinstance(V, VariantTy):
            self._fail(TERM, ctx, t, B, "rule mismatch", f"case on a value of type {F.pretty_formula(V)}")
        prems = [dv]
        new_bs = {c: (x, b) for c, x, b in t.branches}
        for c, A_c in V.ctors:
            br = t.branch(c)
            if br is None:
                self._fail(TERM, ctx, t, B, "rule mismatch", f"missing branch for {c}")
            x, body = br
            x2 = x if x not in _dom(ctx).lam and x not in F.context_fv(ctx).lam else fresh(x)
            if x2 != x:
                body = S.subst(body, Var(x), Var(x2))
            ctx2 = ctx + (LambdaHyp(x2, A_c), EquivHyp(Ctor(c, Var(x2)), dv.subject))
            d = self._left_close(ctx2, len(ctx), lambda c2, body=body: self._check_term(c2, body, B))
            prems.append(d)
            new_bs[c] = (x2, d.subject)
        subject = Case(dv.subject, tuple((c, x, b) for c, (x, b) in new_bs.items()))
        return _node(SUM_E, TERM, ctx, subject, B, prems)

    def _forall_intro_equiv(self, ctx, t, A: ForallT) -> Derivation:
        sem = apply_semantical_restriction(ctx, t, self.budget)
        if sem is None:
            self._fail(TERM, ctx, t, A, "rule mismatch",
                       "∀ introduction needs a value or a term provably equal to one")
        v, verdict = sem
        t0 = S.erase_hints(t)
        ctx2 = ctx + (EquivHyp(t0, v),)
        a2 = _fresh_term_var(A.var, ctx2)
        ctx3 = ctx2 + (TermDecl(a2),)
        body = formula_subst(A.body, TVar(A.var), TVar(a2))
        p = self._check_term(ctx3, t, body)
        b = fresh("b")
        s1 = _node(EQ_TL, TERM, ctx3, v, body, [p], template=TVar(b), var=b, t1=p.subject, t2=v)
        s3 = _node(ALL_I, VALUE, ctx2, v, A, [_down(s1)], var=a2)
        s5 = _node(EQ_TL, TERM, ctx2, p.subject, A, [_up(s3)], template=TVar(b), var=b, t1=v, t2=p.subject)
        macro = _node(MACRO_ALL_I, TERM, ctx2, p.subject, A, [s5])
        return _node(DISCHARGE_EQ, TERM, ctx, p.subject, A, [macro], lhs=t0, rhs=v,
                     certificate=verdict.certificate)

    def _rewrite(self, ctx, t: Rewrite, A) -> Derivation:
        eq = _equation_after(ctx, t.hyp)
        if eq is None:
            self._fail(TERM, ctx, t, A, "rule mismatch", f"no equation recorded for {t.hyp}")
        for src, dst in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
            use_value = isinstance(src, Value) and isinstance(dst, Value)
            var = fresh("r")
            hole = Var(var) if use_value else TVar(var)
            template = abstract_formula(A, src, hole)
            if template is None:
                continue
            goal = formula_subst(template, hole, dst)
            d = self._check_term(ctx, t.term, goal)
            rule = EQ_VR if use_value else EQ_TR
            return _node(rule, TERM, ctx, d.subject, A, [d], template=template, var=var, t1=dst, t2=src)
        self._fail(TERM, ctx, t, A, "rule mismatch", "the equation does not occur in the goal")

    # -- left rules --------------------------------------------------------
    def _left_close(self, ctx, i, cont: Callable) -> Derivation:
        step = self._left_step(ctx, i)
        if step is None:
            return cont(ctx)
        rule, ctx2, side, j = step
        d = cont(ctx2) if j is None else self._left_close(ctx2, j, cont)
        return _node(rule, TERM, ctx, d.subject, d.formula, [d], index=i, **side)

    def _left_step(self, ctx, i):
        e = ctx[i]
        if not isinstance(e, LambdaHyp):
            return None
        x, A = e.var, e.formula
        pre, post = ctx[:i], ctx[i + 1:]
        match A:
            case Member(u, B):
                return MEM_E, pre + (LambdaHyp(x, B), EquivHyp(Var(x), u)) + post, {}, i
            case Restrict(B, u1, u2):
                return RES_E, pre + (LambdaHyp(x, B), EquivHyp(u1, u2)) + post, {}, i
            case ExistsT(a, B):
                a2 = fresh(a)
                B2 = formula_subst(B, TVar(a), TVar(a2))
                return EX_E, pre + (TermDecl(a2), LambdaHyp(x, B2)) + post, {"var": a2}, i + 1
            case ExistsP(X, n, B) if not F.is_top(A):
                X2 = fresh(X)
                B2 = formula_subst(B, PredVar(X, n), _pred_renaming(X2, n))
                return PEX_E, pre + (PredDecl(X2, n), LambdaHyp(x, B2)) + post, {"var": X2}, i + 1
            case RecordTy(()):
                if post and post[0] == EquivHyp(Var(x), UNIT):
                    return None
                return UNIT_ETA, pre + (e, EquivHyp(Var(x), UNIT)) + post, {}, None
        return None

    # -- value judgements --------------------------------------------------
    def _check_value(self, ctx, v, A) -> Derivation:
        if isinstance(v, Scissors) or isinstance(A, (Restrict, ExistsT, ExistsP)) \
                or (isinstance(A, Member) and not alpha_eq(v, A.term)):
            return _down(self._check_term(ctx, v, A))
        match A:
            case ForallT(a, B):
                a2 = _fresh_term_var(a, ctx)
                d = self._check_value(ctx + (TermDecl(a2),), v, formula_subst(B, TVar(a), TVar(a2)))
                return _node(ALL_I, VALUE, ctx, d.subject, A, [d], var=a2)
            case ForallP(X, n, B):
                taken = F.context_fv(ctx).pred | set(_dom(ctx).pred)
                X2 = X if X not in taken else fresh(X)
                d = self._check_value(ctx + (PredDecl(X2, n),), v,
                                      formula_subst(B, PredVar(X, n), _pred_renaming(X2, n)))
                return _node(PALL_I, VALUE, ctx, d.subject, A, [d], var=X2)
            case Member(u, B):
                d = self._check_value(ctx, v, B)
                return _node(MEM_I, VALUE, ctx, d.subject, Member(d.subject, B), [d])
        match v:
            case Var(x):
                H = F.lookup_lambda(ctx, x)
                if H is None:
                    self._fail(VALUE, ctx, v, A, "rule mismatch", f"unbound variable {x}")
                d = _node(AX, VALUE, ctx, v, H)
                if formula_alpha_eq(H, A):
                    return d
                return _down(self._subsume(ctx, _up(d), A))
        if isinstance(A, Named) and A.name in self.types:
            d = self._check_value(ctx, v, self.types.defs[A.name])
            return _node(FOLD, VALUE, ctx, d.subject, A, [d], name=A.name)
        match v, A:
            case Lam(x, body), Arrow(D, B):
                x2 = x if x not in _dom(ctx).lam and x not in F.context_fv(ctx).lam else fresh(x)
                if x2 != x:
                    body = S.subst(body, Var(x), Var(x2))
                ctx2 = ctx + (LambdaHyp(x2, D),)
                d = self._left_close(ctx2, len(ctx), lambda c: self._check_term(c, body, B))
                return _node(IMP_I, VALUE, ctx, Lam(x2, d.subject), A, [d])
            case Ctor(c, w), VariantTy():
                A_c = A.get(c)
                if A_c is None:
                    self._fail(VALUE, ctx, v, A, "rule mismatch", f"constructor {c} not in the variant")
                d = self._check_value(ctx, w, A_c)
                return _node(SUM_I, VALUE, ctx, Ctor(c, d.subject), A, [d])
            case Record(fs), RecordTy(fts):
                if [l for l, _ in fs] != [l for l, _ in fts]:
                    self._fail(VALUE, ctx, v, A, "rule mismatch", "record fields differ from the type")
                ds = [self._check_value(ctx, w, B) for (_, w), (_, B) in zip(fs, fts)]
                return _node(REC_I, VALUE, ctx, Record(tuple((l, d.subject) for (l, _), d in zip(fs, ds))), A, ds)
        self._fail(VALUE, ctx, v, A, "rule mismatch",
                   f"{type(v).__name__.lower()} cannot have type {F.pretty_formula(A)}")

    # -- synthesis ---------------------------------------------------------
    def _synth_value(self, ctx, v) -> Derivation:
        match v:
            case Var(x):
                H = F.lookup_lambda(ctx, x)
                if H is None:
                    self._fail(VALUE, ctx, v, F.TOP, "rule mismatch", f"unbound variable {x}")
                return _node(AX, VALUE, ctx, v, H)
            case Ctor(c, w):
                d = self._synth_value(ctx, w)
                return _node(SUM_I, VALUE, ctx, Ctor(c, d.subject), VariantTy(((c, d.formula),)), [d])
            case Record(fs):
                ds = [self._synth_value(ctx, w) for _, w in fs]
                return _node(REC_I, VALUE, ctx, Record(tuple((l, d.subject) for (l, _), d in zip(fs, ds))),
                             RecordTy(tuple((l, d.formula) for (l, _), d in zip(fs, ds))), ds)
        self._fail(VALUE, ctx, v, F.TOP, "annotation needed", "cannot infer a type for this value")

    def _synth_term(self, ctx, t) -> Derivation:
        if isinstance(t, Value):
            return _up(self._synth_value(ctx, t))
        match t:
            case Annot(u, B):
                return self._check_term(ctx, u, B)
            case Inst(u, w):
                d = self._unfold_head(self._synth_term(ctx, u))
                Q = d.formula
                if isinstance(Q, ForallT) and isinstance(w, Term):
                    w = S.erase_hints(w)
                    return _node(ALL_E, TERM, ctx, d.subject, formula_subst(Q.body, TVar(Q.var), w), [d],
                                 var=Q.var, witness=w)
                if isinstance(Q, ForallP) and isinstance(w, PredicateDef) and w.arity == Q.arity:
                    return _node(PALL_E, TERM, ctx, d.subject, formula_subst(Q.body, PredVar(Q.var, Q.arity), w),
                                 [d], var=Q.var, witness=w)
                self._fail(TERM, ctx, t, F.TOP, "rule mismatch",
                           f"witness does not fit {F.pretty_formula(Q)}")
            case Proj(v, l):
                dv = self._unfold_head(self._synth_value(ctx, v))
                R = dv.formula
                if not isinstance(R, RecordTy) or R.get(l) is None:
                    self._fail(TERM, ctx, t, F.TOP, "rule mismatch", f"no field {l} in {F.pretty_formula(R)}")
                return _node(REC_E, TERM, ctx, Proj(dv.subject, l), R.get(l), [dv])
            case App(f, u):
                if isinstance(f, Lam):
                    self._fail(TERM, ctx, t, F.TOP, "annotation needed", "annotate the result of this let")
                return self._synth_app(ctx, t)
            case TVar(a):
                self._fail(TERM, ctx, t, F.TOP, "annotation needed", f"{a} is an untyped definition")
        self._fail(TERM, ctx, t, F.TOP, "annotation needed", "cannot infer a type for this term")

    def _synth_app(self, ctx, t: App) -> Derivation:
        f, u = t.fn, t.arg
        df = self._unfold_head(self._synth_term(ctx, f))
        Q = df.formula
        pi = F.as_pi(Q)
        if pi is not None:
            a, D, B = pi
            u0 = S.erase_hints(u)
            if isinstance(u0, Value):
                d1 = _node(ALL_E, TERM, ctx, df.subject, formula_subst(Q.body, TVar(a), u0), [df],
                           var=a, witness=u0)
                du = self._check_term(ctx, u, Member(u0, D))
                return _node(IMP_E, TERM, ctx, App(d1.subject, du.subject), d1.formula.cod, [d1, du])
            return self._pi_elim_equiv(ctx, f, u, Q)
        if isinstance(Q, Arrow):
            du = self._check_term(ctx, u, Q.dom)
            return _node(IMP_E, TERM, ctx, App(df.subject, du.subject), Q.cod, [df, du])
        self._fail(TERM, ctx, t, F.TOP, "rule mismatch", f"applying a term of type {F.pretty_formula(Q)}")

    def _pi_elim_equiv(self, ctx, f, u, Q) -> Derivation:
        """Dependent application to a non-value argument provably equal to a value."""
        u0 = S.erase_hints(u)
        sem = apply_semantical_restriction(ctx, u0, self.budget)
        a, D, B = F.as_pi(Q)
        BU = formula_subst(B, TVar(a), u0)
        if sem is None:
            self._fail(TERM, ctx, App(f, u), BU, "rule mismatch",
                       "dependent application to a non-value that is not known equal to a value")
        v, verdict = sem
        ctx2 = ctx + (EquivHyp(u0, v),)
        d = pi_elim_expansion(self, ctx2, f, u, v)
        macro = _node(MACRO_PI_E, TERM, ctx2, d.subject, d.formula, [d])
        return _node(DISCHARGE_EQ, TERM, ctx, d.subject, d.formula, [macro], lhs=u0, rhs=v,
                     certificate=verdict.certificate)


def pi_elim_expansion(ch: Checker, ctx2, f, u, v) -> Derivation:
    """The primitive-rule derivation of `t u : B[a:=u]` from `t : Πa:A B`,
    `u : A` and `u ≡ v` in the context."""
    u0 = S.erase_hints(u)
    df = ch._unfold_head(ch._synth_term(ctx2, f))
    Q = df.formula
    a, D, B = F.as_pi(Q)
    d_all = _node(ALL_E, TERM, ctx2, df.subject, formula_subst(Q.body, TVar(a), u0), [df], var=a, witness=u0)
    du = ch._check_term(ctx2, u, D)
    b = fresh("b")
    s1 = _node(EQ_TL, TERM, ctx2, v, D, [du], template=TVar(b), var=b, t1=du.subject, t2=v)
    s3 = _node(MEM_I, VALUE, ctx2, v, Member(v, D), [_down(s1)])
    s5 = _node(EQ_TL, TERM, ctx2, u0, Member(v, D), [_up(s3)], template=TVar(b), var=b, t1=v, t2=u0)
    s6 = _node(EQ_TR, TERM, ctx2, u0, Member(u0, D), [s5], template=Member(TVar(b), D), var=b, t1=v, t2=u0)
    return _node(IMP_E, TERM, ctx2, App(d_all.subject, s6.subject), d_all.formula.cod, [d_all, s6])


def _up(d: Derivation) -> Derivation:
    return _node(UP, TERM, d.ctx, d.subject, d.formula, [d])


def _down(d: Derivation) -> Derivation:
    if d.kind == VALUE:
        return d
    return _node(DOWN, VALUE, d.ctx, d.subject, d.formula, [d])


def _equation_after(ctx, name):
    idx = None
    for i, e in enumerate(ctx):
        if isinstance(e, LambdaHyp) and e.var == name:
            idx = i
    if idx is None:
        return None
    for e in ctx[idx + 1:]:
        if isinstance(e, EquivHyp):
            return e
    return None


# -- abstraction of term occurrences -----------------------------------------

def abstract_formula(A, target: Term, hole):
    """Replace occurrences of `target` in `A` by `hole` (a fresh Var/TVar);
    None if nothing was replaced."""
    key = S.alpha_key(target)
    fv = S.free_vars(target)
    hit = [False]

    def tr(t, value_pos, bound):
        if not (bound and (bound & (fv.lam | fv.term))) and S.alpha_key(t) == key:
            if value_pos and not isinstance(hole, Value):
                return t
            hit[0] = True
            return hole
        match t:
            case Ctor(c, w):
                return Ctor(c, tr(w, True, bound))
            case Record(fs):
                return Record(tuple((l, tr(w, True, bound)) for l, w in fs))
            case App(g, w):
                return App(tr(g, False, bound), tr(w, False, bound))
            case Proj(w, l):
                return Proj(tr(w, True, bound), l)
            case Lam(x, b):
                return Lam(x, tr(b, False, bound | {x}))
        return t

    def fr(B, bound):
        match B:
            case PredApp(X, args):
                return PredApp(X, tuple(tr(t, False, bound) for t in args))
            case Arrow(a, b):
                return Arrow(fr(a, bound), fr(b, bound))
            case ForallT(a, b) | ExistsT(a, b):
                return type(B)(a, fr(b, bound | {a}))
            case ForallP(X, n, b) | ExistsP(X, n, b):
                return type(B)(X, n, fr(b, bound))
            case RecordTy(fs):
                return RecordTy(tuple((l, fr(a, bound)) for l, a in fs))
            case VariantTy(cs):
                return VariantTy(tuple((c, fr(a, bound)) for c, a in cs))
            case Member(t, a):
                return Member(tr(t, False, bound), fr(a, bound))
            case Restrict(a, t, u):
                return Restrict(fr(a, bound), tr(t, False, bound), tr(u, False, bound))
        return B

    out = fr(A, frozenset())
    return out if hit[0] else None


# -- weakening ---------------------------------------------------------------

def weaken(d: Derivation, at: int, entries: tuple) -> Derivation:
    """Insert context entries at position `at` in every node (admissible:
    inner binders are fresh for the original context)."""
    entries = tuple(entries)

    def ins(ctx):
        return ctx[:at] + entries + ctx[at:]

    def go(n: Derivation) -> Derivation:
        side = dict(n.side)
        if "index" in side and side["index"] >= at:
            side["index"] += len(entries)
        c = n.conclusion
        return Derivation(n.rule, Judgement(c.kind, ins(c.ctx), c.subject, c.formula),
                          tuple(go(p) for p in n.premises), side)
    return go(d)


# -- semantical value restriction ---------------------------------------------

def apply_semantical_restriction(ctx, u: Term, budget: Budget = DEFAULT_BUDGET):
    """Find a value v with ℰ_Γ ⊢ u ≡ v; return (v, verdict) or None."""
    u = S.erase_hints(u)
    E = restrict_to_equational(ctx)
    if isinstance(u, Value):
        return u, Proved({"goal": str(F.Claim(u, u)), "reflexivity": True})
    for v in EQ.value_candidates(E, u, budget):
        verdict = EQ.decide(E, u, v, True, budget)
        if isinstance(verdict, Proved):
            return v, verdict
    return None


# -- validation --------------------------------------------------------------

class _Invalid(Exception):
    pass


def validate(d: Derivation, types: TypeTable | None = None, budget: Budget = DEFAULT_BUDGET,
             primitive_only: bool = False) -> bool:
    return validation_error(d, types, budget, primitive_only) is None


def validation_error(d: Derivation, types: TypeTable | None = None, budget: Budget = DEFAULT_BUDGET,
                     primitive_only: bool = False) -> str | None:
    """First reason the derivation fails to re-check, or None."""
    types = types or TypeTable()
    seen_ctx: dict = {}
    replays: dict = {}
    for n in d.nodes():
        if primitive_only and n.rule not in PRIMITIVE:
            return f"{n.rule}: not a primitive rule"
        key = id(n.ctx)
        if key not in seen_ctx:
            seen_ctx[key] = F.context_valid(n.ctx, types)
        ok, msg = seen_ctx[key]
        if not ok:
            return f"{n.rule}: invalid context ({msg})"
        try:
            _check_node(n, types, budget, replays)
        except _Invalid as e:
            return f"{n.rule}: {e} at {n.conclusion}"
        except (TypeError, ValueError, KeyError, AttributeError, IndexError) as e:
            return f"{n.rule}: malformed node ({e})"
    return None


def _req(cond, msg):
    if not cond:
        raise _Invalid(msg)


def _same(p: Judgement, c: Judgement, kind=None, ctx=True, subject=True, formula=True):
    if kind is not None:
        _req(p.kind == kind, f"premise should be a {kind} judgement")
    if ctx:
        _req(p.ctx == c.ctx, "premise context differs")
    if subject:
        _req(alpha_eq(p.subject, c.subject), "premise subject differs")
    if formula:
        _req(formula_alpha_eq(p.formula, c.formula), "premise formula differs")


def _premises(n, k):
    _req(len(n.premises) == k, f"expected {k} premise(s), got {len(n.premises)}")
    return [p.conclusion for p in n.premises]


def _scoped_witness(w, ctx):
    dom = F.domain(ctx)
    if isinstance(w, PredicateDef):
        msg = F.formula_scoped(w, dom)
    else:
        msg = F._term_scoped(w, dom)
    _req(msg is None, f"witness out of scope: {msg}")


def _check_node(n: Derivation, types, budget, replays):
    c = n.conclusion
    r = n.rule
    s = n.side
    _req(c.kind in (VALUE, TERM), "bad judgement kind")
    if c.kind == VALUE:
        _req(isinstance(c.subject, Value), "value judgement on a non-value")
    if r == AX:
        _premises(n, 0)
        _req(c.kind == VALUE and isinstance(c.subject, Var), "ax needs a variable")
        H = F.lookup_lambda(c.ctx, c.subject.name)
        _req(H is not None and formula_alpha_eq(H, c.formula), "no matching hypothesis")
    elif r == UP:
        (p,) = _premises(n, 1)
        _req(c.kind == TERM and isinstance(c.subject, Value), "↑ concludes a term judgement on a value")
        _same(p, c, VALUE)
    elif r == DOWN:
        (p,) = _premises(n, 1)
        _req(c.kind == VALUE, "↓ concludes a value judgement")
        _same(p, c, TERM)
    elif r == IMP_E:
        p, q = _premises(n, 2)
        _req(c.kind == TERM and isinstance(c.subject, App), "⇒ₑ needs an application")
        _same(p, c, TERM, subject=False, formula=False)
        _same(q, c, TERM, subject=False, formula=False)
        _req(alpha_eq(p.subject, c.subject.fn) and alpha_eq(q.subject, c.subject.arg), "subjects differ")
        _req(isinstance(p.formula, Arrow), "function premise is not an implication")
        _req(formula_alpha_eq(p.formula.dom, q.formula), "argument type differs")
        _req(formula_alpha_eq(p.formula.cod, c.formula), "result type differs")
    elif r == IMP_I:
        (p,) = _premises(n, 1)
        _req(c.kind == VALUE and isinstance(c.subject, Lam) and isinstance(c.formula, Arrow), "⇒ᵢ shape")
        x = c.subject.var
        _req(p.kind == TERM, "premise kind")
        _req(len(p.ctx) == len(c.ctx) + 1 and p.ctx[:-1] == c.ctx, "premise context must extend by one")
        h = p.ctx[-1]
        _req(isinstance(h, LambdaHyp) and h.var == x and formula_alpha_eq(h.formula, c.formula.dom),
             "hypothesis differs")
        _req(alpha_eq(p.subject, c.subject.body) and formula_alpha_eq(p.formula, c.formula.cod), "body differs")
    elif r == MU:
        (p,) = _premises(n, 1)
        _req(c.kind == TERM and isinstance(c.subject, Mu), "μ shape")
        _req(p.kind == TERM and len(p.ctx) == len(c.ctx) + 1 and p.ctx[:-1] == c.ctx
             and isinstance(p.ctx[-1], StackHyp) and p.ctx[-1].var == c.subject.var
             and formula_alpha_eq(p.ctx[-1].formula, c.formula), "premise context")
        _req(alpha_eq(p.subject, c.subject.body) and formula_alpha_eq(p.formula, c.formula), "premise differs")
    elif r == STAR:
        (p,) = _premises(n, 1)
        _req(c.kind == TERM and isinstance(c.subject, Process) and isinstance(c.subject.stack, SVar), "∗ shape")
        H = F.lookup_stack(c.ctx, c.subject.stack.name)
        _req(H is not None, "no stack hypothesis")
        _same(p, c, TERM, subject=False, formula=False)
        _req(alpha_eq(p.subject, c.subject.term) and formula_alpha_eq(p.formula, H), "premise differs")
    elif r == MEM_I:
        (p,) = _premises(n, 1)
        _req(c.kind == VALUE and isinstance(c.formula, Member), "∈ᵢ shape")
        _req(alpha_eq(c.formula.term, c.subject), "membership term must be the subject")
        _same(p, c, VALUE, formula=False)
        _req(formula_alpha_eq(p.formula, c.formula.formula), "premise formula differs")
    elif r in (MEM_E, RES_E, EX_E, PEX_E, UNIT_ETA):
        (p,) = _premises(n, 1)
        _req(c.kind == TERM, "left rules conclude term judgements")
        _same(p, c, TERM, ctx=False)
        i = s["index"]
        h = c.ctx[i]
        _req(isinstance(h, LambdaHyp), "decomposed entry is not a λ-hypothesis")
        pre, post, x, A = c.ctx[:i], c.ctx[i + 1:], h.var, h.formula
        if r == MEM_E:
            _req(isinstance(A, Member), "∈ₑ on a non-membership")
            want = pre + (LambdaHyp(x, A.formula), EquivHyp(Var(x), A.term)) + post
        elif r == RES_E:
            _req(isinstance(A, Restrict), "↾ₑ on a non-restriction")
            want = pre + (LambdaHyp(x, A.formula), EquivHyp(A.lhs, A.rhs)) + post
        elif r == EX_E:
            _req(isinstance(A, ExistsT), "∃ₑ on a non-existential")
            a2 = s["var"]
            fv = F.context_fv(c.ctx) | formula_fv(c.formula)
            _req(a2 not in fv.term and a2 not in F.domain(c.ctx).term
                 and a2 not in S.free_vars(c.subject).term, "freshness of the witness variable")
            want = pre + (TermDecl(a2), LambdaHyp(x, formula_subst(A.body, TVar(A.var), TVar(a2)))) + post
        elif r == PEX_E:
            _req(isinstance(A, ExistsP), "∃_E on a non-existential")
            X2 = s["var"]
            fv = F.context_fv(c.ctx) | formula_fv(c.formula)
            _req(X2 not in fv.pred and X2 not in F.domain(c.ctx).pred, "freshness of the predicate variable")
            B2 = formula_subst(A.body, PredVar(A.var, A.arity), _pred_renaming(X2, A.arity))
            want = pre + (PredDecl(X2, A.arity), LambdaHyp(x, B2)) + post
        else:
            _req(A == RecordTy(()), "×η on a non-empty record type")
            want = pre + (h, EquivHyp(Var(x), UNIT)) + post
        _req(_ctx_alpha_eq(p.ctx, want), "premise context differs from the rule")
    elif r == RES_I:
        (p,) = _premises(n, 1)
        _req(c.kind == TERM and isinstance(c.formula, Restrict), "↾ᵢ shape")
        _req(_has_equation(c.ctx, c.formula.lhs, c.formula.rhs), "equation missing from the context")
        _same(p, c, TERM, formula=False)
        _req(formula_alpha_eq(p.formula, c.formula.formula), "premise formula differs")
    elif r in (ALL_I, PALL_I):
        (p,) = _premises(n, 1)
        _req(c.kind == VALUE, "introduction of ∀ concludes a value judgement")
        _same(p, c, VALUE, ctx=False, formula=False)
        v2 = s["var"]
        fv = F.context_fv(c.ctx)
        dom = F.domain(c.ctx)
        if r == ALL_I:
            _req(isinstance(c.formula, ForallT), "∀ᵢ shape")
            _req(v2 not in fv.term and v2 not in dom.term, "freshness: variable occurs in the context")
            _req(p.ctx == c.ctx + (TermDecl(v2),), "premise context")
            want = formula_subst(c.formula.body, TVar(c.formula.var), TVar(v2))
        else:
            _req(isinstance(c.formula, ForallP), "∀_I shape")
            _req(v2 not in fv.pred and v2 not in dom.pred, "freshness: predicate variable occurs in the context")
            _req(p.ctx == c.ctx + (PredDecl(v2, c.formula.arity),), "premise context")
            want = formula_subst(c.formula.body, PredVar(c.formula.var, c.formula.arity),
                                 _pred_renaming(v2, c.formula.arity))
        _req(formula_alpha_eq(p.formula, want), "premise formula differs")
    elif r in (ALL_E, EX_I, PALL_E, PEX_I):
        (p,) = _premises(n, 1)
        _req(c.kind == TERM, "term judgement expected")
        _same(p, c, TERM, formula=False)
        w = s["witness"]
        _scoped_witness(w, c.ctx)
        quant, inst = (p.formula, c.formula) if r in (ALL_E, PALL_E) else (c.formula, p.formula)
        if r in (ALL_E, EX_I):
            _req(isinstance(quant, ForallT if r == ALL_E else ExistsT), "quantifier shape")
            _req(isinstance(w, Term), "term witness expected")
            want = formula_subst(quant.body, TVar(quant.var), w)
        else:
            _req(isinstance(quant, ForallP if r == PALL_E else ExistsP), "quantifier shape")
            _req(isinstance(w, PredicateDef) and w.arity == quant.arity, "predicate witness arity")
            want = formula_subst(quant.body, PredVar(quant.var, quant.arity), w)
        _req(formula_alpha_eq(inst, want), "instance differs")
    elif r == REC_I:
        _req(c.kind == VALUE and isinstance(c.subject, Record) and isinstance(c.formula, RecordTy), "×ᵢ shape")
        fs, fts = c.subject.fields, c.formula.fields
        _req([l for l, _ in fs] == [l for l, _ in fts], "labels differ")
        ps = _premises(n, len(fs))
        for pj, (_, w), (_, B) in zip(ps, fs, fts):
            _req(pj.kind == VALUE and pj.ctx == c.ctx and alpha_eq(pj.subject, w)
                 and formula_alpha_eq(pj.formula, B), "field premise differs")
    elif r == REC_E:
        (p,) = _premises(n, 1)
        _req(c.kind == TERM and isinstance(c.subject, Proj), "×ₑ shape")
        _same(p, c, VALUE, subject=False, formula=False)
        _req(alpha_eq(p.subject, c.subject.value), "subject differs")
        _req(isinstance(p.formula, RecordTy) and p.formula.get(c.subject.label) is not None, "no such field")
        _req(formula_alpha_eq(p.formula.get(c.subject.label), c.formula), "field type differs")
    elif r == SUM_I:
        (p,) = _premises(n, 1)
        _req(c.kind == VALUE and isinstance(c.subject, Ctor) and isinstance(c.formula, VariantTy), "+ᵢ shape")
        A = c.formula.get(c.subject.name)
        _req(A is not None, "constructor not in the variant")
        _same(p, c, VALUE, subject=False, formula=False)
        _req(alpha_eq(p.subject, c.subject.arg) and formula_alpha_eq(p.formula, A), "premise differs")
    elif r == SUM_E:
        _req(c.kind == TERM and isinstance(c.subject, Case), "+ₑ shape")
        p0 = n.premises[0].conclusion if n.premises else None
        _req(p0 is not None and isinstance(p0.formula, VariantTy), "scrutinee premise")
        ps = _premises(n, 1 + len(p0.formula.ctors))
        _same(p0, c, VALUE, subject=False, formula=False)
        v = c.subject.value
        _req(alpha_eq(p0.subject, v), "scrutinee differs")
        for pj, (C, A) in zip(ps[1:], p0.formula.ctors):
            br = c.subject.branch(C)
            _req(br is not None, f"missing branch {C}")
            x, body = br
            _req(pj.kind == TERM and pj.ctx == c.ctx + (LambdaHyp(x, A), EquivHyp(Ctor(C, Var(x)), v))
                 or _ctx_alpha_eq(pj.ctx, c.ctx + (LambdaHyp(x, A), EquivHyp(Ctor(C, Var(x)), v))),
                 "branch context")
            _req(alpha_eq(pj.subject, body) and formula_alpha_eq(pj.formula, c.formula), "branch differs")
    elif r in (EQ_VL, EQ_TL, EQ_VR, EQ_TR):
        (p,) = _premises(n, 1)
        _req(c.kind == TERM, "rewriting rules conclude term judgements")
        t1, t2, var, tmpl = s["t1"], s["t2"], s["var"], s["template"]
        _req(_has_equation(c.ctx, t1, t2), "equation missing from the context")
        value_rule = r in (EQ_VL, EQ_VR)
        hole = Var(var) if value_rule else TVar(var)
        if value_rule:
            _req(isinstance(t1, Value) and isinstance(t2, Value), "values expected")
        if r in (EQ_VL, EQ_TL):
            _same(p, c, TERM, subject=False)
            _req(alpha_eq(p.subject, S.subst(tmpl, hole, t1)), "premise subject is not the template at t₁")
            _req(alpha_eq(c.subject, S.subst(tmpl, hole, t2)), "conclusion subject is not the template at t₂")
        else:
            _same(p, c, TERM, formula=False)
            _req(formula_alpha_eq(p.formula, formula_subst(tmpl, hole, t1)), "premise formula mismatch")
            _req(formula_alpha_eq(c.formula, formula_subst(tmpl, hole, t2)), "conclusion formula mismatch")
    elif r in (DISCHARGE_EQ, DISCHARGE_NEQ):
        (p,) = _premises(n, 1)
        pol = r == DISCHARGE_EQ
        cls = EquivHyp if pol else InequivHyp
        u1, u2 = s["lhs"], s["rhs"]
        _same(p, c, TERM, ctx=False)
        _req(p.ctx == c.ctx + (cls(u1, u2),), "premise context must add the discharged claim")
        cert = s.get("certificate")
        _req(bool(cert), "missing equivalence certificate")
        E = restrict_to_equational(c.ctx)
        key = ("d", id(c.ctx), S.alpha_key(u1), S.alpha_key(u2), pol)
        if key not in replays:
            if cert.get("reflexivity"):
                replays[key] = alpha_eq(u1, u2) and cert.get("goal") == str(F.Claim(u1, u2, pol))
            else:
                replays[key] = EQ.replay(cert, E, u1, u2, pol, budget)
        _req(replays[key], "certificate does not replay")
    elif r == SCISSORS:
        _premises(n, 0)
        _req(c.kind == VALUE and isinstance(c.subject, Scissors) and F.is_bot(c.formula), "✂ shape")
        cert = s.get("certificate")
        _req(bool(cert) and cert.get("clash"), "missing contradiction certificate")
        key = ("c", id(c.ctx))
        if key not in replays:
            replays[key] = isinstance(EQ.context_contradictory(restrict_to_equational(c.ctx), budget), Proved)
        _req(replays[key], "context is not contradictory")
    elif r in MACROS:
        (p,) = _premises(n, 1)
        _same(p, c, c.kind)
    elif r in (FOLD, UNFOLD):
        (p,) = _premises(n, 1)
        _same(p, c, c.kind, formula=False)
        name = s["name"]
        named, body = (c.formula, p.formula) if r == FOLD else (p.formula, c.formula)
        _req(named == Named(name) and name in types, "unknown type name")
        _req(formula_alpha_eq(types.defs[name], body), "not the definition of the type")
    else:
        raise _Invalid(f"unknown rule {r}")


def _ctx_alpha_eq(a, b) -> bool:
    if len(a) != len(b):
        return False
    for e, f in zip(a, b):
        if type(e) is not type(f):
            return False
        match e:
            case LambdaHyp(x, A) | StackHyp(x, A):
                if x != f.var or not formula_alpha_eq(A, f.formula):
                    return False
            case EquivHyp(t, u) | InequivHyp(t, u):
                if not (alpha_eq(t, f.lhs) and alpha_eq(u, f.rhs)):
                    return False
            case _:
                if e != f:
                    return False
    return True


def expand_macros(d: Derivation) -> Derivation:
    """Replace each derived-rule node by the derivation it stands for."""
    if d.rule in MACROS:
        return expand_macros(d.premises[0])
    return Derivation(d.rule, d.conclusion, tuple(expand_macros(p) for p in d.premises), d.side)


def strip_certificates(d: Derivation) -> Derivation:
    """Copy of `d` with every equivalence certificate removed."""
    side = {k: v for k, v in d.side.items() if k != "certificate"}
    return Derivation(d.rule, d.conclusion, tuple(strip_certificates(p) for p in d.premises), side)


# -- export ------------------------------------------------------------------

def _side_json(v):
    if isinstance(v, (Term, S.Stack)):
        return pretty(v)
    if isinstance(v, (Formula, PredicateDef)):
        return F.pretty_formula(v)
    return v


def derivation_json(d: Derivation, contexts: bool = True) -> dict:
    c = d.conclusion
    out = {
        "rule": d.rule,
        "kind": c.kind,
        "subject": pretty(c.subject),
        "formula": F.pretty_formula(c.formula),
    }
    if contexts:
        out["context"] = [F.pretty_entry(e) for e in c.ctx]
    if d.side:
        out["side"] = {k: _side_json(v) for k, v in d.side.items()}
    if d.premises:
        out["premises"] = [derivation_json(p, contexts) for p in d.premises]
    return out


def derivation_text(d: Derivation, indent: int = 0) -> str:
    lines = [f"{'  ' * indent}{d.rule}  {pretty(d.subject)} : {F.pretty_formula(d.formula)}"]
    for p in d.premises:
        lines.append(derivation_text(p, indent + 1))
    return "\n".join(lines)


def dumps(d: Derivation) -> str:
    return json.dumps(derivation_json(d), ensure_ascii=False)
