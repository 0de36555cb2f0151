"""Recursive-descent parser for `.svr` sources and for the core notation.

Formulas may contain terms (`t ≡ u`, `t ∈ A`), so a formula atom first tries
to read a term followed by `≡`, `≢` or `∈` and backtracks otherwise.
"""

from __future__ import annotations

from .ast import (
    AssertEquiv, Arm, CheckGoal, Diagnostic, EAnnot, EApp, ECtor, EDelta, EInst, ELam,
    ELet, EMatch, EMu, EProj, ERecord, ERestart, ERewrite, EScissors, EUnitProbe, EVar,
    KFrame, KPush, KVar, LetDef, Param, PredWitness, SourceModule, Span, TArrow, TBot,
    TEquation, TMember, TName, TPi, TPredApp, TQuant, TRecord, TRestrict, TTop, TVariant,
    TypeDef, ValDecl,
)
from .lexer import LexError, Token, tokenize

DECL_KEYWORDS = {"type", "let", "assert", "check", "val"}
_ARG_START = {"ident", "ctor", "{", "(", "✂", "δ"}


class ParseError(Exception):
    def __init__(self, diagnostics):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class _Fail(Exception):
    def __init__(self, tok: Token, message: str):
        super().__init__(message)
        self.diagnostic = Diagnostic("error", tok.line, tok.col, tok.start, max(tok.end, tok.start + 1), message)


def _span(a: Token, b: Token | None = None) -> Span:
    b = b or a
    return Span(a.line, a.col, a.start, b.end)


class Parser:
    def __init__(self, src: str, internal: bool = False):
        self.src = src
        self.internal = internal
        self.toks = tokenize(src, internal)
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def prev(self) -> Token:
        return self.toks[self.pos - 1]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_kw(self, word: str) -> bool:
        return self.at("kw", word)

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, tok: Token | None = None):
        raise _Fail(tok or self.tok, message)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            self.fail(f"expected {what or repr(kind)}, found {_describe(self.tok)}")
        return self.next()

    def expect_kw(self, word: str) -> Token:
        if not self.at_kw(word):
            self.fail(f"expected '{word}', found {_describe(self.tok)}")
        return self.next()

    def ident(self, what: str = "an identifier") -> str:
        return self.expect("ident", what).text

    # -- module --------------------------------------------------------------

    def module(self) -> tuple[SourceModule, list[Diagnostic]]:
        decls, diags = [], []
        while not self.at("eof"):
            start = self.pos
            try:
                decls.append(self.decl())
                if not self.at("eof") and not (self.tok.kind == "kw" and self.tok.text in DECL_KEYWORDS):
                    self.fail(f"expected a declaration, found {_describe(self.tok)}")
            except _Fail as e:
                diags.append(e.diagnostic)
                self.pos = max(self.pos, start + 1)
                while not self.at("eof") and not (
                    self.tok.kind == "kw" and self.tok.text in DECL_KEYWORDS and self.tok.col == 1
                ):
                    self.next()
        return SourceModule(tuple(decls)), diags

    def decl(self):
        t = self.tok
        if self.at_kw("type"):
            self.next()
            name = self.expect_name()
            self.expect("=", "'='")
            body = self.typedef_body()
            return TypeDef(name, body, _span(t, self.prev()))
        if self.at_kw("let"):
            self.next()
            rec = False
            if self.at_kw("rec"):
                self.next()
                rec = True
            name = self.ident("a definition name")
            params = []
            while self.at("ident") or self.at("("):
                params.append(self.param())
            result = None
            if self.at(":"):
                self.next()
                result = self.type_()
            self.expect("=", "'='")
            body = self.expr()
            return LetDef(name, rec, tuple(params), result, body, _span(t, self.prev()))
        if self.at_kw("assert"):
            self.next()
            lhs = self.proc()
            if self.at("≡") or self.at("≢"):
                eq = self.next().kind == "≡"
            else:
                self.fail(f"expected '≡' or '≢', found {_describe(self.tok)}")
            rhs = self.proc()
            return AssertEquiv(lhs, rhs, eq, _span(t, self.prev()))
        if self.at_kw("check") or self.at_kw("val"):
            kw = self.next().text
            name = self.ident("a name")
            self.expect(":", "':'")
            ty = self.type_()
            cls = CheckGoal if kw == "check" else ValDecl
            return cls(name, ty, _span(t, self.prev()))
        self.fail(f"expected a declaration, found {_describe(self.tok)}")

    def expect_name(self) -> str:
        if self.at("ident") or self.at("ctor"):
            return self.next().text
        self.fail(f"expected a type name, found {_describe(self.tok)}")

    def param(self) -> Param:
        t = self.tok
        if self.at("("):
            self.next()
            name = self.ident("a parameter name")
            self.expect(":", "':'")
            ty = self.type_()
            self.expect(")", "')'")
            return Param(name, ty, _span(t, self.prev()))
        name = self.next().text
        if self.at(":") and not self.tok.space_before:
            self.next()
            ty = self.type_atom()
            return Param(name, ty, _span(t, self.prev()))
        return Param(name, None, _span(t))

    def typedef_body(self):
        t = self.tok
        if self.at("|") or (self.at("ctor") and self.peek().kind == "["):
            if self.at("|"):
                self.next()
            ctors = [self.variant_case()]
            while self.at("|"):
                self.next()
                ctors.append(self.variant_case())
            return TVariant(tuple(ctors), _span(t, self.prev()))
        return self.type_()

    def variant_case(self):
        c = self.expect("ctor", "a constructor").text
        self.expect("[", "'['")
        if self.at("]"):
            self.next()
            return (c, None)
        ty = self.type_()
        self.expect("]", "']'")
        return (c, ty)

    # -- expressions ---------------------------------------------------------

    def expr(self):
        return self.proc()

    def proc(self):
        t = self.tok
        e = self.binder()
        if self.at("∗"):
            self.next()
            pi = self.stack()
            return ERestart(e, pi, _span(t, self.prev()))
        return e

    def binder(self):
        t = self.tok
        if self.at("λ"):
            self.next()
            x = self.ident("a variable after 'λ'")
            return ELam((x,), self.binder(), _span(t, self.prev()))
        if self.at("μ"):
            self.next()
            a = self.ident("a stack variable after 'μ'")
            return EMu(a, self.binder(), _span(t, self.prev()))
        if self.at_kw("fun"):
            self.next()
            xs = [self.ident("a parameter")]
            while self.at("ident"):
                xs.append(self.next().text)
            self.expect("→", "'→'")
            return ELam(tuple(xs), self.expr(), _span(t, self.prev()))
        if self.at_kw("mu"):
            self.next()
            a = self.ident("a stack variable")
            self.expect("→", "'→'")
            return EMu(a, self.expr(), _span(t, self.prev()))
        if self.at_kw("let"):
            self.next()
            x = self.ident("a variable")
            self.expect("=", "'='")
            bound = self.expr()
            self.expect_kw("in")
            return ELet(x, bound, self.expr(), _span(t, self.prev()))
        if self.at_kw("match"):
            self.next()
            scrut = self.expr()
            self.expect_kw("with")
            if self.at("|"):
                self.next()
            arms = [self.arm()]
            while self.at("|"):
                self.next()
                arms.append(self.arm())
            return EMatch(scrut, tuple(arms), False, _span(t, self.prev()))
        if self.at_kw("rewrite"):
            self.next()
            h = self.ident("a hypothesis name")
            self.expect_kw("in")
            return ERewrite(h, self.binder(), _span(t, self.prev()))
        return self.app()

    def arm(self) -> Arm:
        t = self.tok
        c = self.expect("ctor", "a constructor pattern").text
        self.expect("[", "'['")
        x = None
        if not self.at("]"):
            x = self.ident("a pattern variable")
        self.expect("]", "']'")
        self.expect("→", "'→'")
        return Arm(c, x, self.expr(), _span(t, self.prev()))

    def app(self):
        t = self.tok
        e = self.postfix()
        while self.tok.kind in _ARG_START or self.at_kw("case"):
            e = EApp(e, self.postfix(), _span(t, self.prev()))
        return e

    def postfix(self):
        t = self.tok
        e = self.atom()
        while True:
            if self.at("."):
                dot = self.next()
                if not self.at("ident"):
                    self.fail("expected a field label after '.'", dot)
                e = EProj(e, self.next().text, _span(t, self.prev()))
            elif self.at("{") and not self.tok.space_before:
                self.next()
                w = self.witness()
                self.expect("}", "'}'")
                e = EInst(e, w, _span(t, self.prev()))
            else:
                return e

    def witness(self):
        t = self.tok
        name = None
        if self.tok.kind in ("ctor", "ident") and self.peek().kind == ":=":
            name = self.next().text
            self.next()
        if self.at("("):
            save = self.pos
            self.next()
            params = []
            while self.at("ident"):
                params.append(self.next().text)
            if self.at(","):
                self.next()
                body = self.type_()
                self.expect(")", "')'")
                return PredWitness(name, tuple(params), body, _span(t, self.prev()))
            self.pos = save
        if name is None:
            save = self.pos
            try:
                e = self.expr()
                if self.at("}"):
                    return e
            except _Fail:
                pass
            self.pos = save
        body = self.type_()
        return PredWitness(name, (), body, _span(t, self.prev()))

    def atom(self):
        t = self.tok
        k = t.kind
        if k == "ident":
            if t.text == "unit" and self.peek().kind == "(" and not self.peek().space_before:
                if not self.internal:
                    self.fail("'unit(…)' is internal to the evaluator")
                self.next()
                self.next()
                v = self.expr()
                self.expect(")", "')'")
                return EUnitProbe(v, _span(t, self.prev()))
            self.next()
            return EVar(t.text, _span(t))
        if k == "ctor":
            self.next()
            if not self.at("[") or self.tok.space_before:
                self.fail(f"constructor {t.text} must be followed by '['", t)
            self.next()
            if self.at("]"):
                self.next()
                return ECtor(t.text, None, _span(t, self.prev()))
            arg = self.expr()
            self.expect("]", "']'")
            return ECtor(t.text, arg, _span(t, self.prev()))
        if k == "{":
            self.next()
            fields = []
            if not self.at("}"):
                while True:
                    l = self.ident("a field label")
                    self.expect("=", "'='")
                    fields.append((l, self.expr()))
                    if self.at(";"):
                        self.next()
                        continue
                    break
            self.expect("}", "'}'")
            labels = [l for l, _ in fields]
            if len(set(labels)) != len(labels):
                self.fail("duplicate field label in record", t)
            return ERecord(tuple(fields), _span(t, self.prev()))
        if k == "(":
            self.next()
            e = self.expr()
            if self.at(":"):
                self.next()
                ty = self.type_()
                self.expect(")", "')'")
                return EAnnot(e, ty, _span(t, self.prev()))
            self.expect(")", "')'")
            return e
        if k == "✂":
            self.next()
            return EScissors(_span(t))
        if k == "kw" and t.text == "case":
            self.next()
            v = self.atom()
            self.expect("{", "'{'")
            arms = []
            if not self.at("}"):
                arms.append(self.arm())
                while self.at("|"):
                    self.next()
                    arms.append(self.arm())
            self.expect("}", "'}'")
            return EMatch(v, tuple(arms), True, _span(t, self.prev()))
        if k == "δ":
            if not self.internal:
                self.fail("'δ' is internal to the evaluator")
            self.next()
            self.expect("(", "'('")
            a = self.expr()
            self.expect(",", "','")
            b = self.expr()
            self.expect(")", "')'")
            return EDelta(a, b, _span(t, self.prev()))
        self.fail(f"expected an expression, found {_describe(t)}")

    def stack(self):
        t = self.tok
        if self.at("["):
            self.next()
            e = self.expr()
            self.expect("]", "']'")
            return KFrame(e, self.stack(), _span(t, self.prev()))
        if self.at("ident") and self.peek().kind != ".":
            return KVar(self.next().text, _span(t))
        v = self.atom()
        self.expect(".", "'.'")
        return KPush(v, self.stack(), _span(t, self.prev()))

    # -- types ---------------------------------------------------------------

    def type_(self):
        t = self.tok
        if self.at("∀") or self.at("∃"):
            q = self.next().kind
            if self.at("ident") or self.at("ctor"):
                v = self.next().text
            else:
                self.fail(f"expected a variable after '{q}'")
            arity = None
            if self.at(":") and self.peek().kind == "int" and not self.tok.space_before:
                self.next()
                arity = int(self.next().text)
            return TQuant(q, v, arity, self.type_(), _span(t, self.prev()))
        if self.at("Π"):
            self.next()
            v = self.ident("a variable after 'Π'")
            self.expect(":", "':'")
            dom = self.type_atom()
            return TPi(v, dom, self.type_(), _span(t, self.prev()))
        a = self.restrict_type()
        if self.at("⇒"):
            self.next()
            return TArrow(a, self.type_(), _span(t, self.prev()))
        return a

    def restrict_type(self):
        t = self.tok
        a = self.type_atom()
        while self.at("↾"):
            self.next()
            lhs = self.binder()
            if not (self.at("≡") or self.at("≢")):
                self.fail(f"expected '≡' or '≢', found {_describe(self.tok)}")
            eq = self.next().kind == "≡"
            rhs = self.binder()
            a = TRestrict(a, lhs, rhs, eq, _span(t, self.prev()))
        return a

    def type_atom(self):
        t = self.tok
        if self.tok.kind in _ARG_START or self.tok.kind in ("λ", "μ") or (
            self.tok.kind == "kw" and self.tok.text in ("case", "fun", "mu", "match", "let", "rewrite")
        ):
            save = self.pos
            try:
                e = self.proc()
                if self.at("≡") or self.at("≢"):
                    eq = self.next().kind == "≡"
                    rhs = self.proc()
                    return TEquation(e, rhs, eq, _span(t, self.prev()))
                if self.at("∈") or self.at_kw("in"):
                    self.next()
                    return TMember(e, self.type_atom(), _span(t, self.prev()))
            except _Fail:
                pass
            self.pos = save
        if self.at("("):
            self.next()
            a = self.type_()
            self.expect(")", "')'")
            return a
        if self.at("⊤"):
            self.next()
            return TTop(_span(t))
        if self.at("⊥"):
            self.next()
            return TBot(_span(t))
        if self.at("{"):
            self.next()
            fields = []
            if not self.at("}"):
                while True:
                    l = self.ident("a field label")
                    self.expect(":", "':'")
                    fields.append((l, self.type_()))
                    if self.at(";"):
                        self.next()
                        continue
                    break
            self.expect("}", "'}'")
            return TRecord(tuple(fields), _span(t, self.prev()))
        if self.at("["):
            self.next()
            ctors = []
            while True:
                c = self.expect("ctor", "a constructor").text
                self.expect(":", "':'")
                ctors.append((c, self.type_()))
                if self.at("|"):
                    self.next()
                    continue
                break
            self.expect("]", "']'")
            return TVariant(tuple(ctors), _span(t, self.prev()))
        if self.at("ctor"):
            self.next()
            if self.at("(") and not self.tok.space_before:
                self.next()
                args = [self.proc()]
                while self.at(","):
                    self.next()
                    args.append(self.proc())
                self.expect(")", "')'")
                return TPredApp(t.text, tuple(args), _span(t, self.prev()))
            return TName(t.text, _span(t))
        if self.at("ident"):
            self.next()
            return TName(t.text, _span(t))
        self.fail(f"expected a type, found {_describe(t)}")


def _describe(t: Token) -> str:
    return "end of input" if t.kind == "eof" else repr(t.text)


# -- entry points ------------------------------------------------------------

def _run(src: str, internal: bool, rule: str):
    try:
        p = Parser(src, internal)
        result = getattr(p, rule)()
        if not p.at("eof"):
            p.fail(f"unexpected {_describe(p.tok)}")
        return result
    except LexError as e:
        raise ParseError(e.diagnostic) from None
    except _Fail as e:
        raise ParseError(e.diagnostic) from None


def parse_module(src: str) -> tuple[SourceModule, list[Diagnostic]]:
    """Parse a whole file, recovering at declaration boundaries."""
    try:
        p = Parser(src)
    except LexError as e:
        return SourceModule(()), [e.diagnostic]
    return p.module()


def parse(src: str) -> SourceModule:
    mod, diags = parse_module(src)
    if diags:
        raise ParseError(diags)
    return mod


def parse_expr(src: str, internal: bool = False):
    return _run(src, internal, "expr")


def parse_type(src: str, internal: bool = False):
    return _run(src, internal, "type_")


def parse_stack_expr(src: str, internal: bool = True):
    return _run(src, internal, "stack")


def parse_term(src: str, term_vars=frozenset(), internal: bool = True):
    """Parse core notation into a core term.  Free names become λ-variables
    unless listed in `term_vars`."""
    from .desugar import Scope, desugar_expr
    return desugar_expr(parse_expr(src, internal), Scope.opened(term_vars=term_vars), literal=True)


def parse_formula(src: str, term_vars=frozenset(), types=frozenset(), internal: bool = True):
    from .desugar import Scope, desugar_type
    return desugar_type(parse_type(src, internal), Scope.opened(term_vars=term_vars, types=types), literal=True)


def parse_stack(src: str, term_vars=frozenset()):
    from .desugar import Scope, desugar_stack
    return desugar_stack(parse_stack_expr(src), Scope.opened(term_vars=term_vars), literal=True)
