"""Parse algebra expressions such as ``(j^2*q*p-1)/(1+q*p)*dx*y``."""

from __future__ import annotations

from . import syntax
from .algebra import Element, Presentation, Relation
from .scalar import ONE, VARIABLES, J, Scalar, var
from .syntax import ParseError

_SCALAR_SYMBOLS = set(VARIABLES) | {"j"}


def _evaluator(P: Presentation) -> syntax.Evaluator:
    def symbol(sym: syntax.Sym) -> Element:
        if sym.name in P.index:
            return Element.word((P.index[sym.name],))
        if sym.name == "j":
            return Element.scalar(J)
        if sym.name in _SCALAR_SYMBOLS:
            return Element.scalar(var(sym.name))
        raise ParseError(f"unknown generator {sym.name!r}", sym.pos)

    def divide(x: Element, y: Element) -> Element:
        s = y.scalar_part()
        if s is None:
            raise ParseError("can only divide by a scalar")
        if s.is_zero():
            raise ParseError("division by zero")
        return x.scale(s.inverse())

    def power(x: Element, n: int) -> Element:
        if n < 0:
            s = x.scalar_part()
            if s is None or s.is_zero():
                raise ParseError("negative powers are only defined for nonzero scalars")
            return Element.scalar(s ** n)
        acc = Element.scalar(ONE)
        for _ in range(n):
            acc = acc.concat(x)
        return acc

    return syntax.Evaluator(
        number=lambda n: Element.scalar(Scalar.coerce(n)),
        symbol=symbol,
        divide=divide,
        power=power,
    )


def parse_expr(text: str, P: Presentation) -> Element:
    """Element over ``P``, not normalized; products keep written order."""
    return _evaluator(P)(syntax.parse(text))


def parse_relation(text: str, P: Presentation, label: str = "") -> list[Relation]:
    """Parse ``A = B`` or a chain ``A = B = C`` (each side equals the last)."""
    sides = [s.strip() for s in text.split("=")]
    if len(sides) < 2 or any(not s for s in sides):
        raise ParseError(f"not a relation: {text!r}")
    elems = [parse_expr(s, P) for s in sides]
    label = label or text
    return [Relation(label, e, elems[-1]) for e in elems[:-1]]
