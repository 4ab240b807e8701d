"""Text front end for concepts, assertions, GCIs and knowledge-base files.

Grammar (ASCII)::

    concept   := conj ('|' conj)*
    conj      := postfix ('&' postfix)*
    postfix   := unary (('(-)' | '(+)') const)*
    unary     := '!' unary | primary
    primary   := NAME | const | '(' concept ')' | ('some' | 'all') NAME '.' unary

    const     := INT | DECIMAL | INT '/' INT
    assertion := concept ('>=' | '>' | '<=' | '<') ['-'] const
    gci       := concept '[=' concept [ '>=' const ]        # fuzzy GCI when degree given
    abox      := NAME ':' assertion | '(' NAME ',' NAME ')' ':' NAME ('>=' | '>') const

A KB file holds one statement per line; ``#`` starts a comment.  Bare
concepts are accepted as classical query concepts.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from .grid import rewrite_fuzzy_gci
from .syntax import (
    ABox, And, Assertion, Atom, CmpOp, Concept, Const, Exists, Forall, GCI, KB, Minus, Not, Or, Plus,
    RoleAssertion, Sequent, SyntaxErrorAt, fmt_rational,
)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<shift>\(\s*[-+]\s*\))
  | (?P<num>\d+(?:\.\d+)?(?:\s*/\s*\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\[=|>=|<=|[<>!&|().:,\-])
""", re.VERBOSE)

KEYWORDS = {"some", "all"}
CMP = {">=": CmpOp.GE, ">": CmpOp.GT, "<=": CmpOp.LE, "<": CmpOp.LT}


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    pos = 0
    col0 = 0
    while pos < len(text):
        if text[pos] == "\n":
            line += 1
            pos += 1
            col0 = pos
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SyntaxErrorAt(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tok = m.group()
            if kind == "shift":
                tok = kind = "(-)" if "-" in tok else "(+)"
            elif kind == "name" and tok in KEYWORDS:
                kind = tok
            elif kind == "op":
                kind = tok
            out.append(Token(kind, tok, line, pos - col0 + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - col0 + 1))
    return out


def parse_number(text: str) -> Fraction:
    text = re.sub(r"\s+", "", text)
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(Fraction(num), int(den))
    return Fraction(text)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise SyntaxErrorAt(f"{msg} (found {found!r})", tok.line, tok.col)

    def eat(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        t = self.tok
        self.i += 1
        return t

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    # constants -------------------------------------------------------------
    def number(self, allow_sign: bool = False) -> Fraction:
        sign = 1
        if allow_sign and self.at("-"):
            self.i += 1
            sign = -1
        t = self.eat("num")
        try:
            return sign * parse_number(t.text)
        except (ValueError, ZeroDivisionError) as e:
            self.error(f"bad number: {e}", t)

    def unit_const(self) -> Fraction:
        t = self.tok
        v = self.number()
        if not 0 <= v <= 1:
            raise SyntaxErrorAt(f"constant {fmt_rational(v)} outside [0,1]", t.line, t.col)
        return v

    # concepts --------------------------------------------------------------
    def concept(self) -> Concept:
        c = self.conj()
        while self.at("|"):
            self.i += 1
            c = Or(c, self.conj())
        return c

    def conj(self) -> Concept:
        c = self.postfix()
        while self.at("&"):
            self.i += 1
            c = And(c, self.postfix())
        return c

    def postfix(self) -> Concept:
        c = self.unary()
        while self.at("(-)", "(+)"):
            kind = self.tok.kind
            self.i += 1
            v = self.unit_const()
            c = Minus(c, v) if kind == "(-)" else Plus(c, v)
        return c

    def unary(self) -> Concept:
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Concept:
        t = self.tok
        if t.kind == "name":
            self.i += 1
            return Atom(t.text)
        if t.kind == "num":
            return Const(self.unit_const())
        if t.kind == "(":
            self.i += 1
            c = self.concept()
            self.eat(")")
            return c
        if t.kind in ("some", "all"):
            self.i += 1
            role = self.eat("name").text
            self.eat(".")
            body = self.unary()
            return Exists(role, body) if t.kind == "some" else Forall(role, body)
        self.error("expected a concept")

    # statements ------------------------------------------------------------
    def cmp(self, allowed=tuple(CMP)) -> CmpOp:
        if self.tok.kind not in allowed:
            self.error("expected one of " + " ".join(allowed))
        op = CMP[self.tok.kind]
        self.i += 1
        return op

    def assertion_tail(self, c: Concept) -> Assertion:
        op = self.cmp()
        return Assertion(c, op, self.number(allow_sign=True))

    def statement(self):
        """One KB line: returns (kind, payload)."""
        # (a, b) : R >= c
        if self.at("(") and self.peek().kind == "name" and self.peek(2).kind == ",":
            self.i += 1
            src = self.eat("name").text
            self.eat(",")
            dst = self.eat("name").text
            self.eat(")")
            self.eat(":")
            role = self.eat("name").text
            t = self.tok
            if self.at("<", "<="):
                raise SyntaxErrorAt("role assertions must use > or >=", t.line, t.col)
            op = self.cmp((">=", ">"))
            return "role", RoleAssertion(role, src, dst, op, self.number())
        # a : C >= c
        if self.at("name") and self.peek().kind == ":":
            name = self.eat("name").text
            self.eat(":")
            c = self.concept()
            return "abox", (name, self.assertion_tail(c))
        c = self.concept()
        if self.at("[="):
            self.i += 1
            d = self.concept()
            if self.at(">="):
                self.i += 1
                t = self.tok
                p = self.number()
                try:
                    return "gci", rewrite_fuzzy_gci(c, d, p)
                except ValueError as e:
                    raise SyntaxErrorAt(str(e), t.line, t.col) from None
            return "gci", GCI(c, d)
        if self.at(*CMP):
            return "assertion", self.assertion_tail(c)
        return "concept", c

    def done(self):
        if not self.at("eof"):
            self.error("unexpected trailing input")


def _run(text: str, method: str):
    p = _Parser(tokenize(text))
    out = getattr(p, method)()
    p.done()
    return out


def parse_concept(text: str) -> Concept:
    return _run(text, "concept")


def parse_assertion(text: str) -> Assertion:
    p = _Parser(tokenize(text))
    c = p.concept()
    a = p.assertion_tail(c)
    p.done()
    return a


def parse_gci(text: str) -> GCI:
    kind, payload = _run(text, "statement")
    if kind != "gci":
        raise SyntaxErrorAt("expected a GCI 'C [= D'")
    return payload


def parse_kb(text: str) -> KB:
    """Parse a KB file (GCIs, query assertions, ABox lines, bare concepts)."""
    tbox, query, concepts, cas, ras = [], [], [], [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = tokenize(line, lineno)
        if toks[0].kind == "eof":
            continue
        p = _Parser(toks)
        kind, payload = p.statement()
        p.done()
        {"gci": tbox, "assertion": query, "concept": concepts, "abox": cas, "role": ras}[kind].append(payload)
    return KB(tuple(tbox), tuple(query), ABox(tuple(cas), tuple(ras)), tuple(concepts))


def parse(text: str):
    """Parse a single concept, assertion or GCI; multi-line text becomes a KB."""
    if "\n" in text.strip():
        return parse_kb(text)
    kind, payload = _run(text, "statement")
    if kind in ("abox", "role"):
        return parse_kb(text)
    return payload


def print_concept(c: Concept) -> str:
    return c.text


def print_kb(kb: KB) -> str:
    lines = [str(g) for g in kb.tbox]
    lines += [str(a) for a in kb.query]
    lines += [f"{n} : {a}" for n, a in kb.abox.concept_assertions]
    lines += [str(r) for r in kb.abox.role_assertions]
    lines += [c.text for c in kb.concepts]
    return "\n".join(lines) + ("\n" if lines else "")


def print_sequent(s: Sequent) -> str:
    return "\n".join(str(a) for a in s)
