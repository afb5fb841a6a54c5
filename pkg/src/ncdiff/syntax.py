"""Tokenizer and recursive-descent parser for the expression grammar.

The same grammar serves scalar text (``(j^2*q*p-1)/(1+q*p)``) and algebra
elements (``q^-1*x*y - dx*dx``).  Parsing produces a small AST; evaluation
is left to the caller, which decides what a bare identifier means.

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('+'|'-') unary | power
    power  := atom ('^' ['-'|'+'] INT)?
    atom   := INT | IDENT | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, TypeVar, Union


class ParseError(ValueError):
    """Malformed input text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        self.text = text
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Sym:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Sum:
    terms: tuple["Node", ...]
    signs: tuple[int, ...]


@dataclass(frozen=True)
class Prod:
    # written order is kept; the algebra is noncommutative
    factors: tuple["Node", ...]


@dataclass(frozen=True)
class Div:
    num: "Node"
    den: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


Node = Union[Num, Sym, Neg, Sum, Prod, Div, Pow]

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'?)|(?P<op>[-+*/^()]))"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos, self.text)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return node

    def expr(self) -> Node:
        terms = [self.term()]
        signs = [1]
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, _ = self.take()
            terms.append(self.term())
            signs.append(1 if op == "+" else -1)
        if len(terms) == 1:
            return terms[0]
        return Sum(tuple(terms), tuple(signs))

    def term(self) -> Node:
        node = self.unary()
        factors = [node]
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, _ = self.take()
            rhs = self.unary()
            if op == "*":
                factors.append(rhs)
            else:
                left = factors[0] if len(factors) == 1 else Prod(tuple(factors))
                factors = [Div(left, rhs)]
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def unary(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("+", "-"):
            self.take()
            arg = self.unary()
            return Neg(arg) if val == "-" else arg
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val in ("+", "-"):
                self.take()
                sign = -1 if val == "-" else 1
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be an integer", pos, self.text)
            return Pow(base, sign * int(val))
        return base

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "int":
            return Num(int(val))
        if kind == "ident":
            return Sym(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos, self.text)


def parse(text: str) -> Node:
    return _Parser(text).parse()


T = TypeVar("T")


@dataclass
class Evaluator:
    """Fold an AST into values of some ring-like type.

    ``symbol`` resolves identifiers, ``divide`` and ``power`` are supplied
    because their legality depends on the target (only scalars invert).
    """

    number: Callable[[int], T]
    symbol: Callable[[Sym], T]
    divide: Callable[[T, T], T]
    power: Callable[[T, int], T]

    def __call__(self, node: Node):
        if isinstance(node, Num):
            return self.number(node.value)
        if isinstance(node, Sym):
            return self.symbol(node)
        if isinstance(node, Neg):
            return -self(node.arg)
        if isinstance(node, Sum):
            acc = None
            for term, sign in zip(node.terms, node.signs):
                val = self(term)
                if sign < 0:
                    val = -val
                acc = val if acc is None else acc + val
            return acc
        if isinstance(node, Prod):
            acc = self(node.factors[0])
            for f in node.factors[1:]:
                acc = acc * self(f)
            return acc
        if isinstance(node, Div):
            return self.divide(self(node.num), self(node.den))
        if isinstance(node, Pow):
            return self.power(self(node.base), node.exp)
        raise TypeError(f"not an expression node: {node!r}")
