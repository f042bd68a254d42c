"""A small language for q-bracket relations.

Grammar (whitespace is insignificant)::

    relation := expr "=" expr
    expr     := term (("+" | "-") term)*
    term     := ["-"] factor (["*"] factor)*
    factor   := "0" | NUMBER | "q" | "qbar"
              | "qint" "(" ["-"] INT ")"
              | "qbracket" "(" LABEL ")"
              | "qpow" "(" ["-"] LABEL ")"
              | LABEL
              | "[" expr "," expr "]" ["_" ("q" | "qbar" | "1")]
              | "(" expr ")"
    NUMBER   := INT ["/" INT]
    LABEL    := letter (letter | digit)*

``[a, b]_x`` is ``a b - x b a``; a bare ``[a, b]`` is the ordinary
commutator.  ``qbracket(h1)`` is ``(q^h1 - q^-h1)/(q - q^-1)`` and
``qpow(-Ntilde1)`` is ``q^(-Ntilde1)``.  Juxtaposition is the operator
product; leading scalar factors multiply the rest of the term.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class RelationSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class QSym:
    name: str  # "q" or "qbar"


@dataclass(frozen=True)
class QInt:
    k: int


@dataclass(frozen=True)
class GenRef:
    label: str


@dataclass(frozen=True)
class QBracketOfH:
    label: str


@dataclass(frozen=True)
class QPow:
    label: str
    sign: int


@dataclass(frozen=True)
class ScalarMul:
    scalar: "Scalar"
    expr: "Expr"


@dataclass(frozen=True)
class Product:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Bracket:
    left: "Expr"
    right: "Expr"
    deform: str = "one"  # "one" | "q" | "qbar"


@dataclass(frozen=True)
class Neg:
    expr: "Expr"


@dataclass(frozen=True)
class Sum:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Difference:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Relation:
    lhs: "Expr"
    rhs: "Expr"


Scalar = Union[Num, QSym, QInt]
Expr = Union[Zero, Num, QSym, QInt, GenRef, QBracketOfH, QPow, ScalarMul, Product, Bracket, Neg,
             Sum, Difference]
SCALARS = (Num, QSym, QInt)

# --- tokenizer ------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[\[\](),+\-*=_]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise RelationSyntaxError(f"unknown token {text[bad]!r}", text, bad)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise RelationSyntaxError(msg, self.text, tok[2])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def relation(self) -> Relation:
        lhs = self.expr()
        self.expect("=")
        rhs = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return Relation(lhs, rhs)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.term()
            node = Sum(node, rhs) if op == "+" else Difference(node, rhs)
        return node

    def _starts_factor(self):
        kind, val, _ = self.peek()
        return kind in ("num", "name") or val in ("[", "(")

    def term(self):
        if self.peek()[1] == "-":
            self.next()
            return Neg(self.term())
        factors = [self.factor()]
        while self._starts_factor() or self.peek()[1] == "*":
            if self.peek()[1] == "*":
                self.next()
            tok = self.peek()
            f = self.factor()
            if isinstance(f, SCALARS) and not isinstance(factors[-1], SCALARS):
                self.error("scalar factors must lead a term", tok)
            factors.append(f)
        return self._fold(factors)

    def _fold(self, factors):
        if len(factors) > 1 and isinstance(factors[0], SCALARS):
            return ScalarMul(factors[0], self._fold(factors[1:]))
        node = factors[0]
        for f in factors[1:]:
            node = Product(node, f)
        return node

    def factor(self):
        kind, val, pos = self.next()
        if kind == "num":
            if val == "0":
                return Zero()
            return Num(Fraction(val))
        if kind == "name":
            if val in ("q", "qbar"):
                return QSym(val)
            if val == "qint":
                self.expect("(")
                sign = 1
                if self.peek()[1] == "-":
                    self.next()
                    sign = -1
                tok = self.next()
                if tok[0] != "num" or "/" in tok[1]:
                    self.error("qint() takes an integer", tok)
                self.expect(")")
                return QInt(sign * int(tok[1]))
            if val == "qbracket":
                self.expect("(")
                label = self._label()
                self.expect(")")
                return QBracketOfH(label)
            if val == "qpow":
                self.expect("(")
                sign = 1
                if self.peek()[1] == "-":
                    self.next()
                    sign = -1
                label = self._label()
                self.expect(")")
                return QPow(label, sign)
            return GenRef(val)
        if val == "[":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            deform = "one"
            if self.peek()[1] == "_":
                self.next()
                tok = self.next()
                if tok[1] not in ("q", "qbar", "1"):
                    self.error("bracket deformation must be q, qbar or 1", tok)
                deform = "one" if tok[1] == "1" else tok[1]
            return Bracket(a, b, deform)
        if val == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {val or 'end of input'!r}", (kind, val, pos))

    def _label(self):
        tok = self.next()
        if tok[0] != "name":
            self.error("expected a generator label", tok)
        return tok[1]


def parse_relation(text: str) -> Relation:
    """Parse one relation; raises :class:`RelationSyntaxError` with a position."""
    return _Parser(text).relation()


# --- serialization --------------------------------------------------------

_ADDITIVE = (Sum, Difference, Neg)


def _wrap(node, kinds) -> str:
    s = to_text(node)
    return f"({s})" if isinstance(node, kinds) else s


def to_text(node) -> str:
    """Canonical text; ``parse_relation(to_text(r)) == r``."""
    if isinstance(node, Relation):
        return f"{to_text(node.lhs)} = {to_text(node.rhs)}"
    if isinstance(node, Zero):
        return "0"
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, QSym):
        return node.name
    if isinstance(node, QInt):
        return f"qint({node.k})"
    if isinstance(node, GenRef):
        return node.label
    if isinstance(node, QBracketOfH):
        return f"qbracket({node.label})"
    if isinstance(node, QPow):
        return f"qpow({'-' if node.sign < 0 else ''}{node.label})"
    if isinstance(node, Bracket):
        tail = "" if node.deform == "one" else f"_{node.deform}"
        return f"[{to_text(node.left)}, {to_text(node.right)}]{tail}"
    if isinstance(node, ScalarMul):
        return f"{to_text(node.scalar)} {_wrap(node.expr, _ADDITIVE)}"
    if isinstance(node, Product):
        left = _wrap(node.left, _ADDITIVE + (ScalarMul,) + SCALARS)
        right = _wrap(node.right, _ADDITIVE + (ScalarMul, Product) + SCALARS)
        return f"{left} {right}"
    if isinstance(node, Neg):
        return f"-{_wrap(node.expr, _ADDITIVE)}"
    if isinstance(node, Sum):
        return f"{to_text(node.left)} + {_wrap(node.right, (Sum, Difference))}"
    if isinstance(node, Difference):
        return f"{to_text(node.left)} - {_wrap(node.right, (Sum, Difference))}"
    raise TypeError(f"not a relation node: {node!r}")


def labels(node) -> set[str]:
    """Generator labels referenced by an expression."""
    if isinstance(node, (GenRef, QPow)):
        return {node.label}
    if isinstance(node, QBracketOfH):
        return {node.label}
    out: set[str] = set()
    for attr in ("lhs", "rhs", "left", "right", "expr"):
        child = getattr(node, attr, None)
        if child is not None:
            out |= labels(child)
    return out
