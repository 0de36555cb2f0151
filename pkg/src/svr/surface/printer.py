"""Pretty-printer for surface trees; its output parses back to an equal tree."""

from __future__ import annotations

from .ast import (
    AssertEquiv, CheckGoal, EAnnot, EApp, ECtor, EDelta, EInst, ELam, ELet, EMatch, EMu,
    EProj, ERecord, ERestart, ERewrite, EScissors, EUnitProbe, EVar, KFrame, KPush, KVar,
    LetDef, PredWitness, SourceModule, TArrow, TBot, TEquation, TMember, TName, TPi,
    TPredApp, TQuant, TRecord, TRestrict, TTop, TVariant, TypeDef, ValDecl,
)

PROC, BINDER, APP, POSTFIX, ATOM = range(5)
_GREEDY = (ELam, EMu, ELet, EMatch)


def _paren(s: str, wrap: bool) -> str:
    return f"({s})" if wrap else s


def _trailing_match(e) -> bool:
    match e:
        case EMatch(core=False):
            return True
        case ELam(_, b) | EMu(_, b) | ELet(_, _, b) | ERewrite(_, b):
            return _trailing_match(b)
    return False


def _arms(arms) -> list[str]:
    out = []
    for i, a in enumerate(arms):
        body = print_expr(a.body)
        if i < len(arms) - 1 and _trailing_match(a.body):
            body = f"({body})"
        pat = f"{a.ctor}[{a.var or ''}]"
        out.append(f"{pat} → {body}")
    return out


def print_expr(e, level: int = PROC) -> str:
    match e:
        case EVar(x):
            return x
        case EScissors():
            return "✂"
        case ECtor(c, None):
            return f"{c}[]"
        case ECtor(c, a):
            return f"{c}[{print_expr(a)}]"
        case ERecord(fs):
            return "{" + "; ".join(f"{l} = {print_expr(x)}" for l, x in fs) + "}"
        case EAnnot(x, ty):
            return f"({print_expr(x)} : {print_type(ty)})"
        case EDelta(a, b):
            return f"δ({print_expr(a)}, {print_expr(b)})"
        case EUnitProbe(a):
            return f"unit({print_expr(a)})"
        case EMatch(v, arms, True):
            return f"case {print_expr(v, ATOM)} {{{' | '.join(_arms(arms))}}}"
        case EProj(x, l):
            return _paren(f"{print_expr(x, POSTFIX)}.{l}", level > POSTFIX)
        case EInst(x, w):
            return _paren(f"{print_expr(x, POSTFIX)}{{{_witness(w)}}}", level > POSTFIX)
        case EApp(f, a):
            return _paren(f"{print_expr(f, APP)} {print_expr(a, POSTFIX)}", level > APP)
        case ELam(xs, b):
            return _paren(f"fun {' '.join(xs)} → {print_expr(b)}", level > BINDER)
        case EMu(a, b):
            return _paren(f"mu {a} → {print_expr(b)}", level > BINDER)
        case ELet(x, b, body):
            return _paren(f"let {x} = {print_expr(b)} in {print_expr(body)}", level > BINDER)
        case EMatch(v, arms, False):
            s = f"match {print_expr(v)} with " + " ".join("| " + a for a in _arms(arms))
            return _paren(s, level > BINDER)
        case ERewrite(h, b):
            return _paren(f"rewrite {h} in {print_expr(b, BINDER)}", level > BINDER)
        case ERestart(x, pi):
            left = print_expr(x, BINDER)
            if isinstance(x, _GREEDY) and not (isinstance(x, EMatch) and x.core):
                left = f"({left})"
            return _paren(f"{left} ∗ {print_stack(pi)}", level > PROC)
    raise TypeError(f"not an expression: {e!r}")


def print_stack(pi) -> str:
    match pi:
        case KVar(a):
            return a
        case KPush(v, rest):
            return f"{print_expr(v, ATOM)}.{print_stack(rest)}"
        case KFrame(t, rest):
            return f"[{print_expr(t)}]{print_stack(rest)}"
    raise TypeError(pi)


def _witness(w) -> str:
    if isinstance(w, PredWitness):
        prefix = f"{w.name} := " if w.name else ""
        if w.params or not w.name:
            return f"{prefix}({' '.join(w.params)}, {print_type(w.body)})"
        return prefix + print_type(w.body)
    return print_expr(w)


TYPE, RESTRICT, TATOM = range(3)


def print_type(t, level: int = TYPE) -> str:
    match t:
        case TName(n):
            return n
        case TTop():
            return "⊤"
        case TBot():
            return "⊥"
        case TPredApp(n, args):
            return f"{n}({', '.join(print_expr(a) for a in args)})"
        case TRecord(fs):
            return "{" + "; ".join(f"{l} : {print_type(a)}" for l, a in fs) + "}"
        case TVariant(cs):
            return "[" + " | ".join(f"{c} : {print_type(a) if a is not None else '{}'}" for c, a in cs) + "]"
        case TEquation(l, r, eq):
            return _paren(f"{print_expr(l)} {'≡' if eq else '≢'} {print_expr(r)}", level > TYPE)
        case TMember(e, a):
            return _paren(f"{print_expr(e)} ∈ {print_type(a, TATOM)}", level > TYPE)
        case TRestrict(a, l, r, eq):
            s = f"{print_type(a, RESTRICT)} ↾ {_restrict_side(l)} {'≡' if eq else '≢'} {_restrict_side(r)}"
            return _paren(s, level > RESTRICT)
        case TArrow(a, b):
            return _paren(f"{print_type(a, RESTRICT)} ⇒ {print_type(b)}", level > TYPE)
        case TQuant(q, v, n, b):
            ar = f":{n}" if n is not None else ""
            return _paren(f"{q}{v}{ar} {print_type(b, TATOM)}", level > TYPE)
        case TPi(v, d, b):
            return _paren(f"Π{v}:{print_type(d, TATOM)} {print_type(b, TATOM)}", level > TYPE)
    raise TypeError(f"not a type: {t!r}")


def _restrict_side(e) -> str:
    s = print_expr(e, BINDER)
    return f"({s})" if isinstance(e, ERestart) else s


def print_decl(d) -> str:
    match d:
        case TypeDef(n, TVariant(cs)):
            return f"type {n} = " + " | ".join(
                f"{c}[{print_type(a) if a is not None else ''}]" for c, a in cs)
        case TypeDef(n, body):
            return f"type {n} = {print_type(body)}"
        case LetDef(n, rec, params, result, body):
            ps = "".join(f" ({p.name} : {print_type(p.type)})" if p.type is not None else f" {p.name}"
                         for p in params)
            res = f" : {print_type(result)}" if result is not None else ""
            return f"let {'rec ' if rec else ''}{n}{ps}{res} = {print_expr(body)}"
        case AssertEquiv(l, r, eq):
            return f"assert {print_expr(l)} {'≡' if eq else '≢'} {print_expr(r)}"
        case CheckGoal(n, ty):
            return f"check {n} : {print_type(ty)}"
        case ValDecl(n, ty):
            return f"val {n} : {print_type(ty)}"
    raise TypeError(d)


def print_module(m: SourceModule) -> str:
    return "\n".join(print_decl(d) for d in m.decls) + "\n"
