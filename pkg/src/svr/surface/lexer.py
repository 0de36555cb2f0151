"""Tokenizer for `.svr` sources.  Unicode notation and ASCII fallbacks map
to the same token kinds."""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Diagnostic

KEYWORDS = {
    "let", "rec", "in", "match", "with", "fun", "mu", "type", "assert", "check",
    "val", "rewrite", "case", "forall", "exists", "Pi", "top", "bot",
}

# longest first
SYMBOLS = [
    ("|>", "↾"), ("->", "→"), ("=>", "⇒"), ("==", "≡"), ("!=", "≢"), ("%%", "✂"),
    (":=", ":="),
    ("→", "→"), ("⇒", "⇒"), ("≡", "≡"), ("≢", "≢"), ("∈", "∈"), ("↾", "↾"), ("✂", "✂"),
    ("∗", "∗"), ("*", "∗"), ("λ", "λ"), ("μ", "μ"), ("Π", "Π"), ("∀", "∀"), ("∃", "∃"),
    ("⊤", "⊤"), ("⊥", "⊥"), ("δ", "δ"),
    ("(", "("), (")", ")"), ("[", "["), ("]", "]"), ("{", "{"), ("}", "}"),
    (",", ","), (";", ";"), (":", ":"), ("=", "="), ("|", "|"), (".", "."),
]
_SYMBOL_CHARS = {"λ", "μ", "Π", "δ"}
ASCII_KEYWORD_SYMBOLS = {"forall": "∀", "exists": "∃", "Pi": "Π", "top": "⊤", "bot": "⊥"}
_SUBSCRIPTS = "₀₁₂₃₄₅₆₇₈₉"


@dataclass(frozen=True)
class Token:
    kind: str      # "ident", "ctor", "int", "kw", a symbol, or "eof"
    text: str
    line: int
    col: int
    start: int
    end: int
    space_before: bool

    def __str__(self):
        return self.text if self.kind != "eof" else "end of input"


class LexError(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diagnostic = diag


def _ident_char(ch: str, internal: bool) -> bool:
    if ch in _SYMBOL_CHARS:
        return False
    if ch in _SUBSCRIPTS:
        return internal
    return ch.isalnum() or ch in "_'"


def tokenize(src: str, internal: bool = False) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    space = True

    def adv(k):
        nonlocal i, line, col
        for _ in range(k):
            if src[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = src[i]
        if ch.isspace():
            adv(1)
            space = True
            continue
        if src.startswith("(*", i):
            sl, sc, si = line, col, i
            depth = 0
            while i < n:
                if src.startswith("(*", i):
                    depth += 1
                    adv(2)
                elif src.startswith("*)", i):
                    depth -= 1
                    adv(2)
                    if depth == 0:
                        break
                else:
                    adv(1)
            if depth:
                raise LexError(Diagnostic("error", sl, sc, si, n, "unterminated comment"))
            space = True
            continue
        sl, sc, si = line, col, i
        if ch.isdigit() and not (toks and toks[-1].kind == "ident" and not space):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            adv(j - i)
            toks.append(Token("int", src[si:i], sl, sc, si, i, space))
            space = False
            continue
        if _ident_char(ch, internal) and not ch.isdigit() and ch not in _SUBSCRIPTS:
            j = i
            while j < n and _ident_char(src[j], internal):
                j += 1
            word = src[i:j]
            adv(j - i)
            if word in ASCII_KEYWORD_SYMBOLS:
                kind = ASCII_KEYWORD_SYMBOLS[word]
            elif word in KEYWORDS:
                kind = "kw"
            elif word[0].isupper():
                kind = "ctor"
            else:
                kind = "ident"
            toks.append(Token(kind, word, sl, sc, si, i, space))
            space = False
            continue
        for sym, kind in SYMBOLS:
            if src.startswith(sym, i):
                adv(len(sym))
                toks.append(Token(kind, sym, sl, sc, si, i, space))
                space = False
                break
        else:
            if ch in _SUBSCRIPTS:
                msg = "subscript digits are reserved for generated names"
            else:
                msg = f"unexpected character {ch!r}"
            raise LexError(Diagnostic("error", sl, sc, si, si + 1, msg))
    toks.append(Token("eof", "", line, col, n, n, True))
    return toks
