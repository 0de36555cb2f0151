"""Surface syntax trees.  Spans are carried for diagnostics but ignored by
equality, so a reparsed tree compares equal to the original."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    start: int
    end: int


NOSPAN = Span(0, 0, 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    col: int
    start: int
    end: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {"severity": self.severity, "line": self.line, "col": self.col,
                "start": self.start, "end": self.end, "message": self.message}


def _sp():
    return field(default=NOSPAN, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class EVar:
    name: str
    span: Span = _sp()


@dataclass(frozen=True)
class ELam:
    params: tuple
    body: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class EMu:
    name: str
    body: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class EApp:
    fun: "Expr"
    arg: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class ECtor:
    name: str
    arg: Optional["Expr"]
    span: Span = _sp()


@dataclass(frozen=True)
class ERecord:
    fields: tuple  # ((label, Expr), ...) in source order
    span: Span = _sp()


@dataclass(frozen=True)
class EProj:
    expr: "Expr"
    label: str
    span: Span = _sp()


@dataclass(frozen=True)
class Arm:
    ctor: str
    var: Optional[str]
    body: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class EMatch:
    scrutinee: "Expr"
    arms: tuple
    core: bool = False  # written as `case v {...}`
    span: Span = _sp()


@dataclass(frozen=True)
class ELet:
    name: str
    bound: "Expr"
    body: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class EScissors:
    span: Span = _sp()


@dataclass(frozen=True)
class EAnnot:
    expr: "Expr"
    type: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class PredWitness:
    name: Optional[str]
    params: tuple
    body: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class EInst:
    expr: "Expr"
    witness: Union["Expr", PredWitness]
    span: Span = _sp()


@dataclass(frozen=True)
class ERewrite:
    hyp: str
    body: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class ERestart:
    expr: "Expr"
    stack: "StackExpr"
    span: Span = _sp()


@dataclass(frozen=True)
class EDelta:
    left: "Expr"
    right: "Expr"
    span: Span = _sp()


@dataclass(frozen=True)
class EUnitProbe:
    arg: "Expr"
    span: Span = _sp()


Expr = Union[EVar, ELam, EMu, EApp, ECtor, ERecord, EProj, EMatch, ELet, EScissors,
             EAnnot, EInst, ERewrite, ERestart, EDelta, EUnitProbe]


@dataclass(frozen=True)
class KVar:
    name: str
    span: Span = _sp()


@dataclass(frozen=True)
class KPush:
    value: Expr
    rest: "StackExpr"
    span: Span = _sp()


@dataclass(frozen=True)
class KFrame:
    term: Expr
    rest: "StackExpr"
    span: Span = _sp()


StackExpr = Union[KVar, KPush, KFrame]


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class TName:
    name: str
    span: Span = _sp()


@dataclass(frozen=True)
class TPredApp:
    name: str
    args: tuple
    span: Span = _sp()


@dataclass(frozen=True)
class TArrow:
    dom: "Type"
    cod: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class TQuant:
    kind: str          # "∀" or "∃"
    var: str
    arity: Optional[int]
    body: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class TPi:
    var: str
    dom: "Type"
    body: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class TEquation:
    lhs: Expr
    rhs: Expr
    equal: bool = True
    span: Span = _sp()


@dataclass(frozen=True)
class TMember:
    expr: Expr
    type: "Type"
    span: Span = _sp()


@dataclass(frozen=True)
class TRestrict:
    type: "Type"
    lhs: Expr
    rhs: Expr
    equal: bool = True
    span: Span = _sp()


@dataclass(frozen=True)
class TRecord:
    fields: tuple
    span: Span = _sp()


@dataclass(frozen=True)
class TVariant:
    ctors: tuple  # ((ctor, Type | None), ...); None means the empty record
    span: Span = _sp()


@dataclass(frozen=True)
class TTop:
    span: Span = _sp()


@dataclass(frozen=True)
class TBot:
    span: Span = _sp()


Type = Union[TName, TPredApp, TArrow, TQuant, TPi, TEquation, TMember, TRestrict,
             TRecord, TVariant, TTop, TBot]


# -- declarations ------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    type: Optional[Type] = None
    span: Span = _sp()


@dataclass(frozen=True)
class TypeDef:
    name: str
    body: Type
    span: Span = _sp()


@dataclass(frozen=True)
class LetDef:
    name: str
    rec: bool
    params: tuple
    result: Optional[Type]
    body: Expr
    span: Span = _sp()

    @property
    def annotated(self) -> bool:
        return self.result is not None or any(p.type is not None for p in self.params)


@dataclass(frozen=True)
class AssertEquiv:
    lhs: Expr
    rhs: Expr
    equal: bool = True
    span: Span = _sp()


@dataclass(frozen=True)
class CheckGoal:
    name: str
    type: Type
    span: Span = _sp()


@dataclass(frozen=True)
class ValDecl:
    name: str
    type: Type
    span: Span = _sp()


Decl = Union[TypeDef, LetDef, AssertEquiv, CheckGoal, ValDecl]


@dataclass(frozen=True)
class SourceModule:
    decls: tuple
