"""The call-by-value abstract machine.

`step` implements the reduction rules on processes `t ∗ π` (right-to-left
call-by-value), plus the δ rule (delegated to an equivalence oracle) and the
`unit({})` probe rule.  Every process that cannot step is classified into a
`BlockedClass`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Union

from .syntax import (
    UNIT, App, Case, Ctor, Delta, Frame, Lam, Mu, Process, Proj, Push, Record,
    SVar, Scissors, Stack, TVar, Term, Unit, Value, Var, pretty, subst,
)


# -- oracles -----------------------------------------------------------------

class EquivOracle(Protocol):
    def inequivalent(self, v: Value, w: Value) -> bool:
        """True means DefinitelyInequivalent; False means NotKnownInequivalent."""


class NullOracle:
    """Never claims inequivalence: δ never fires (the index-0 relation)."""

    def inequivalent(self, v: Value, w: Value) -> bool:
        return False


NULL_ORACLE = NullOracle()


# -- results -----------------------------------------------------------------

class StuckForm(Enum):
    CTOR_PROJECTED = "constructor projected"
    LAMBDA_PROJECTED = "lambda projected"
    CTOR_APPLIED = "constructor applied"
    RECORD_APPLIED = "record applied"
    CASE_ON_LAMBDA = "case on lambda"
    CASE_ON_RECORD = "case on record"
    MISSING_BRANCH = "missing case branch"
    MISSING_FIELD = "missing field"
    # unit(v) with v a value other than {} (probe extension)
    UNIT_MISMATCH = "unit on non-empty value"


@dataclass(frozen=True)
class Final:
    value: Value
    stack_var: SVar


@dataclass(frozen=True)
class Stuck:
    form: StuckForm
    process: Process


@dataclass(frozen=True)
class DeltaLike:
    left: Value
    right: Value
    stack: Stack


@dataclass(frozen=True)
class OpenLambdaVar:
    form: str  # "proj", "apply", "case" or "unit"
    process: Process


@dataclass(frozen=True)
class OpenTermVar:
    var: TVar
    stack: Stack


@dataclass(frozen=True)
class ScissorsHit:
    process: Process


BlockedClass = Union[Final, Stuck, DeltaLike, OpenLambdaVar, OpenTermVar, ScissorsHit]


@dataclass(frozen=True)
class Next:
    process: Process
    rule: str


@dataclass(frozen=True)
class Blocked:
    cls: BlockedClass


StepResult = Union[Next, Blocked]


@dataclass(frozen=True)
class Converged:
    value: Value
    stack_var: SVar
    steps: int


@dataclass(frozen=True)
class Halted:
    cls: BlockedClass
    steps: int


@dataclass(frozen=True)
class OutOfFuel:
    last: Process
    steps: int


RunOutcome = Union[Converged, Halted, OutOfFuel]


# -- the machine -------------------------------------------------------------

def step(p: Process, oracle: EquivOracle = NULL_ORACLE) -> StepResult:
    t, pi = p.term, p.stack
    match t:
        case App(f, u):
            return Next(Process(u, Frame(f, pi)), "app")
        case Mu(alpha, body):
            return Next(Process(subst(body, SVar(alpha), pi), pi), "mu")
        case Process():
            return Next(t, "restart")
        case Scissors():
            return Blocked(ScissorsHit(p))
        case Value():
            return _value_step(t, pi, p)
        case Proj(v, label):
            match v:
                case Record():
                    field = v.get(label)
                    if field is None:
                        return Blocked(Stuck(StuckForm.MISSING_FIELD, p))
                    return Next(Process(field, pi), "proj")
                case Ctor():
                    return Blocked(Stuck(StuckForm.CTOR_PROJECTED, p))
                case Lam():
                    return Blocked(Stuck(StuckForm.LAMBDA_PROJECTED, p))
                case Var():
                    return Blocked(OpenLambdaVar("proj", p))
                case Scissors():
                    return Blocked(ScissorsHit(p))
        case Case(v, _):
            match v:
                case Ctor(c, arg):
                    br = t.branch(c)
                    if br is None:
                        return Blocked(Stuck(StuckForm.MISSING_BRANCH, p))
                    x, body = br
                    return Next(Process(subst(body, Var(x), arg), pi), "case")
                case Lam():
                    return Blocked(Stuck(StuckForm.CASE_ON_LAMBDA, p))
                case Record():
                    return Blocked(Stuck(StuckForm.CASE_ON_RECORD, p))
                case Var():
                    return Blocked(OpenLambdaVar("case", p))
                case Scissors():
                    return Blocked(ScissorsHit(p))
        case TVar():
            return Blocked(OpenTermVar(t, pi))
        case Delta(v, w):
            if oracle.inequivalent(v, w):
                return Next(Process(v, pi), "delta")
            return Blocked(DeltaLike(v, w, pi))
        case Unit(v):
            match v:
                case Record(()):
                    return Next(Process(UNIT, pi), "unit")
                case Var():
                    return Blocked(OpenLambdaVar("unit", p))
                case Scissors():
                    return Blocked(ScissorsHit(p))
                case _:
                    return Blocked(Stuck(StuckForm.UNIT_MISMATCH, p))
    raise TypeError(f"not a machine term: {t!r}")


def _value_step(v: Value, pi: Stack, p: Process) -> StepResult:
    match pi:
        case SVar():
            return Blocked(Final(v, pi))
        case Frame(f, rest):
            return Next(Process(f, Push(v, rest)), "frame")
        case Push(arg, rest):
            match v:
                case Lam(x, body):
                    return Next(Process(subst(body, Var(x), arg), rest), "beta")
                case Var():
                    return Blocked(OpenLambdaVar("apply", p))
                case Ctor():
                    return Blocked(Stuck(StuckForm.CTOR_APPLIED, p))
                case Record():
                    return Blocked(Stuck(StuckForm.RECORD_APPLIED, p))
    raise TypeError(f"not a stack: {pi!r}")


def run(p: Process, fuel: int, oracle: EquivOracle = NULL_ORACLE) -> RunOutcome:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = 0
    while True:
        r = step(p, oracle)
        if isinstance(r, Blocked):
            if isinstance(r.cls, Final):
                return Converged(r.cls.value, r.cls.stack_var, steps)
            return Halted(r.cls, steps)
        if steps == fuel:
            return OutOfFuel(p, steps)
        p = r.process
        steps += 1


def trace(p: Process, fuel: int, oracle: EquivOracle = NULL_ORACLE) -> list[Process]:
    return [q for q, _ in trace_rules(p, fuel, oracle)]


def trace_rules(p: Process, fuel: int, oracle: EquivOracle = NULL_ORACLE) -> list[tuple[Process, str | None]]:
    """Successive states paired with the rule that produced each (None for the
    start state)."""
    out: list[tuple[Process, str | None]] = [(p, None)]
    for _ in range(fuel):
        r = step(p, oracle)
        if isinstance(r, Blocked):
            break
        p = r.process
        out.append((p, r.rule))
    return out


def classify(p: Process, oracle: EquivOracle = NULL_ORACLE) -> BlockedClass | None:
    r = step(p, oracle)
    return r.cls if isinstance(r, Blocked) else None


# -- serialisation -----------------------------------------------------------

def trace_text(states: list[tuple[Process, str | None]]) -> str:
    lines = []
    for i, (q, rule) in enumerate(states):
        tag = f"[{rule}]" if rule else "[start]"
        lines.append(f"{i:>4} {tag:<10} {pretty(q.term)} ∗ {pretty(q.stack)}")
    return "\n".join(lines)


def trace_json(states: list[tuple[Process, str | None]]) -> list[dict]:
    return [{"term": pretty(q.term), "stack": pretty(q.stack), "rule": rule} for q, rule in states]


def describe_blocked(cls: BlockedClass) -> str:
    match cls:
        case Final(v, a):
            return f"final {pretty(v)} ∗ {a.name}"
        case Stuck(form, q):
            return f"stuck ({form.value}): {pretty(q)}"
        case DeltaLike(v, w, _):
            return f"δ-like δ({pretty(v)}, {pretty(w)})"
        case OpenLambdaVar(form, q):
            return f"blocked on free λ-variable ({form}): {pretty(q)}"
        case OpenTermVar(a, _):
            return f"blocked on free term variable {a.name}"
        case ScissorsHit(q):
            return f"scissors reached: {pretty(q)}"
    return repr(cls)


def outcome_json(o: RunOutcome) -> dict:
    match o:
        case Converged(v, a, n):
            return {"outcome": "converged", "value": pretty(v), "stack_var": a.name, "steps": n}
        case Halted(cls, n):
            kind = type(cls).__name__
            d = {"outcome": "halted", "class": kind, "detail": describe_blocked(cls), "steps": n}
            if isinstance(cls, Stuck):
                d["form"] = cls.form.value
            return d
        case OutOfFuel(last, n):
            return {"outcome": "out_of_fuel", "last": pretty(last), "steps": n}
    raise TypeError(o)


def dumps_trace(states) -> str:
    return json.dumps(trace_json(states), ensure_ascii=False)
