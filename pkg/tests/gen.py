"""Shared generators: a brute-force enumerator of small syntax and
hypothesis strategies for random terms, stacks and processes."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product

from hypothesis import strategies as st

from svr import syntax as S

CTORS = ("C", "D")
LABELS = ("l", "m")
LVARS = ("x", "y")
SVARS = ("α", "β")
TVARS = ("a",)


def _subsets(xs):
    for k in range(len(xs) + 1):
        yield from combinations(xs, k)


def _splits(total, parts):
    """Ordered tuples of `parts` positive sizes summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def values(n: int) -> tuple:
    out = []
    if n == 1:
        out += [S.Var(x) for x in LVARS] + [S.Scissors(), S.UNIT]
    if n >= 2:
        out += [S.Lam(x, t) for x in LVARS for t in terms(n - 1)]
        out += [S.Ctor(c, v) for c in CTORS for v in values(n - 1)]
        for labels in _subsets(LABELS):
            if not labels:
                continue
            for sizes in _splits(n - 1, len(labels)):
                for vs in product(*(values(k) for k in sizes)):
                    out.append(S.Record(tuple(zip(labels, vs))))
    return tuple(out)


@lru_cache(maxsize=None)
def terms(n: int) -> tuple:
    out = list(values(n))
    if n == 1:
        out += [S.TVar(a) for a in TVARS]
    if n >= 2:
        out += [S.Mu(al, t) for al in SVARS[:1] for t in terms(n - 1)]
        out += [S.Proj(v, l) for l in LABELS for v in values(n - 1)]
        out += [S.Unit(v) for v in values(n - 1)]
    if n >= 3:
        for k in range(1, n - 1):
            out += [S.App(a, b) for a in terms(k) for b in terms(n - 1 - k)]
            out += [S.Process(t, pi) for t in terms(k) for pi in stacks(n - 1 - k)]
            out += [S.Delta(v, w) for v in values(k) for w in values(n - 1 - k)]
        for ctors in _subsets(CTORS):
            for vsize in range(1, n):
                rest = n - 1 - vsize
                for sizes in _splits(rest, len(ctors)):
                    for v in values(vsize):
                        for bodies in product(*(terms(k) for k in sizes)):
                            out.append(S.Case(v, tuple((c, "x", b) for c, b in zip(ctors, bodies))))
    return tuple(out)


@lru_cache(maxsize=None)
def stacks(n: int) -> tuple:
    out = []
    if n == 1:
        out += [S.SVar(a) for a in SVARS]
    for k in range(1, n - 1):
        out += [S.Push(v, pi) for v in values(k) for pi in stacks(n - 1 - k)]
        out += [S.Frame(t, pi) for t in terms(k) for pi in stacks(n - 1 - k)]
    return tuple(out)


def processes(max_size: int):
    """Every process `t ∗ π` with 1 + |t| + |π| ≤ max_size."""
    for total in range(3, max_size + 1):
        for k in range(1, total - 1):
            for t in terms(k):
                for pi in stacks(total - 1 - k):
                    yield S.Process(t, pi)


# -- hypothesis strategies ---------------------------------------------------

names = st.sampled_from(LVARS + ("z",))
svars = st.sampled_from(SVARS)
tvars = st.sampled_from(("a", "b"))
ctors = st.sampled_from(CTORS)
labels = st.sampled_from(LABELS)




def value_st(depth: int = 3, delta: bool = True):
    return _value(depth, delta)


def _value(depth, delta):
    base = st.one_of(st.builds(S.Var, names), st.just(S.UNIT))
    if depth <= 0:
        return base
    sub_v = st.deferred(lambda: _value(depth - 1, delta))
    sub_t = st.deferred(lambda: _term(depth - 1, delta))
    return st.one_of(
        base,
        st.builds(S.Lam, names, sub_t),
        st.builds(S.Ctor, ctors, sub_v),
        st.dictionaries(labels, sub_v, max_size=2).map(lambda d: S.Record(tuple(d.items()))),
    )


def _term(depth, delta):
    base = st.one_of(st.builds(S.Var, names), st.builds(S.TVar, tvars), st.just(S.UNIT))
    if depth <= 0:
        return base
    v = st.deferred(lambda: _value(depth - 1, delta))
    t = st.deferred(lambda: _term(depth - 1, delta))
    pi = st.deferred(lambda: _stack(depth - 1, delta))
    options = [
        _value(depth, delta),
        st.builds(S.App, t, t),
        st.builds(S.Mu, svars, t),
        st.builds(S.Process, t, pi),
        st.builds(S.Proj, v, labels),
        st.builds(lambda v, bs: S.Case(v, tuple((c, x, b) for c, (x, b) in sorted(bs.items()))),
                  v, st.dictionaries(ctors, st.tuples(names, t), max_size=2)),
        st.builds(S.Unit, v),
    ]
    if delta:
        options.append(st.builds(S.Delta, v, v))
    return st.one_of(*options)


def _stack(depth, delta):
    base = st.builds(S.SVar, svars)
    if depth <= 0:
        return base
    v = st.deferred(lambda: _value(depth - 1, delta))
    t = st.deferred(lambda: _term(depth - 1, delta))
    pi = st.deferred(lambda: _stack(depth - 1, delta))
    return st.one_of(base, st.builds(S.Push, v, pi), st.builds(S.Frame, t, pi))


def term_st(depth: int = 3, delta: bool = True):
    return _term(depth, delta)


def stack_st(depth: int = 3, delta: bool = True):
    return _stack(depth, delta)


def process_st(depth: int = 3, delta: bool = True):
    return st.builds(S.Process, _term(depth, delta), _stack(depth, delta))


def closed_value_st(depth: int = 2):
    """Closed values over the alphabet (no free variables)."""
    if depth <= 0:
        return st.one_of(st.just(S.UNIT), st.just(S.Lam("x", S.Var("x"))))
    sub = st.deferred(lambda: closed_value_st(depth - 1))
    return st.one_of(
        st.just(S.UNIT),
        st.just(S.Lam("x", S.Var("x"))),
        st.builds(S.Ctor, ctors, sub),
        st.dictionaries(labels, sub, min_size=1, max_size=2).map(lambda d: S.Record(tuple(d.items()))),
    )
