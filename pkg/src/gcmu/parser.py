"""Recursive-descent parser for the formula syntax.

Grammar (``~`` only in front of atoms, binders scope maximally to the right)::

    formula := disj
    disj    := conj {"|" conj}
    conj    := unary {"&" unary}
    unary   := "true" | "false" | ident | "~" ident | "(" formula ")"
             | "<" action ">" unary | "[" action "]" unary
             | ("mu" | "nu") ident "." formula
             | ("EX" | "AX" | "EF" | "AF" | "EG" | "AG") unary
             | ("E" | "A") "[" formula "U" formula "]"

Comments run from ``//`` to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from gcmu import formula as fm

KEYWORDS = {"true", "false", "mu", "nu", "EX", "AX", "EF", "AF", "EG", "AG", "U"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[()<>\[\]&|~.*])
""", re.VERBOSE)


class ParseError(fm.FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'sym' or 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = re.match(r"\S+", text[pos:]).group(0)
            raise ParseError(f"unknown operator {bad!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(0), line, pos - line_start + 1))
        newlines = m.group(0).count("\n")
        if newlines:
            line += newlines
            line_start = pos + m.group(0).rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.bound: frozenset[str] = frozenset()

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind != "eof" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            found = tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return tok

    def ident(self, what: str) -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def action(self) -> str:
        if self.accept("*"):
            return fm.CTL_ACTION
        return self.ident("action name")

    def formula(self) -> fm.Formula:
        f = self.conj()
        while self.accept("|"):
            f = fm.Or(f, self.conj())
        return f

    def conj(self) -> fm.Formula:
        f = self.unary()
        while self.accept("&"):
            f = fm.And(f, self.unary())
        return f

    def unary(self) -> fm.Formula:
        tok = self.tok
        t = tok.text
        if tok.kind == "eof":
            self.error("unexpected end of input")
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("~"):
            if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
                self.error("negation is only allowed in front of an atom")
            if self.tok.text in self.bound:
                self.error(f"negated fixpoint variable {self.tok.text!r}")
            return fm.NegProp(self.ident("atom"))
        if self.accept("<"):
            a = self.action()
            self.expect(">")
            return fm.Diamond(a, self.unary())
        if self.accept("["):
            a = self.action()
            self.expect("]")
            return fm.Box(a, self.unary())
        if tok.kind != "ident":
            self.error(f"unexpected {t!r}")
        if t in ("mu", "nu"):
            self.i += 1
            x = self.ident("fixpoint variable")
            self.expect(".")
            outer = self.bound
            self.bound = outer | {x}
            body = self.formula()
            self.bound = outer
            return fm.Mu(x, body) if t == "mu" else fm.Nu(x, body)
        if t in ("EX", "AX", "EF", "AF", "EG", "AG"):
            self.i += 1
            return fm._make(t, None, (self.unary(),))
        if t in ("E", "A") and self.peek().text == "[":
            self.i += 2
            left = self.formula()
            self.expect("U")
            right = self.formula()
            self.expect("]")
            return fm.EU_(left, right) if t == "E" else fm.AU_(left, right)
        if t == "true":
            self.i += 1
            return fm.Top()
        if t == "false":
            self.i += 1
            return fm.Bot()
        if t in KEYWORDS:
            self.error(f"unexpected keyword {t!r}")
        self.i += 1
        return fm.Var(t) if t in self.bound else fm.Prop(t)


def parse(text: str) -> fm.Formula:
    """Parse ``text`` into a (possibly sugared) formula.

    Identifiers bound by an enclosing ``mu``/``nu`` become variables, all
    others propositions.  Raises :class:`ParseError` with line and column.
    """
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return f
