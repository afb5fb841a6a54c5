"""Exact arithmetic in Q(j)(q, p, q', k), j a primitive cube root of unity.

A :class:`Scalar` is stored as ``(a + j*b) / e`` with ``a, b, e`` polynomials
over Q in a fixed variable set.  Since ``e`` is always rationalized to lie in
Q[vars] (multiply through by the Galois conjugate of a j-valued denominator),
the pair ``(a/e, b/e)`` is determined by the field element, and dividing out
``gcd(a, b, e)`` and making ``e`` monic yields a unique representative.  Two
scalars are equal iff their stored triples are equal.

Polynomial multiplication and gcd are delegated to FLINT's ``fmpq_mpoly``.
The randomized zero test below evaluates term by term in pure Python with
:class:`CycloRational` and does not touch the gcd path.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Union

import flint

from . import syntax

__all__ = [
    "CycloRational",
    "Scalar",
    "ScalarError",
    "MalformedScalarError",
    "PoleError",
    "PARAMS",
    "ANSATZ_UNKNOWNS",
    "VARIABLES",
    "J",
    "ONE",
    "ZERO",
    "canonical",
    "substitute",
    "is_zero_randomized",
    "parse_scalar",
    "var",
]

PARAMS = ("q", "p", "q'", "k")
ANSATZ_UNKNOWNS = tuple(f"C{i}" for i in range(1, 17))
VARIABLES = PARAMS + ANSATZ_UNKNOWNS

_INTERNAL = tuple(v.replace("'", "prime") for v in VARIABLES)
_CTX = flint.fmpq_mpoly_ctx.get(_INTERNAL, "lex")
_NVARS = len(VARIABLES)
_INDEX = {name: i for i, name in enumerate(VARIABLES)}


class ScalarError(ArithmeticError):
    pass


class MalformedScalarError(ScalarError):
    """A fraction with an identically zero denominator."""


class PoleError(ScalarError):
    """Substitution or evaluation made a denominator vanish."""


@total_ordering
class CycloRational:
    """``re + jc*j`` in Q(j) = Q[j]/(j^2 + j + 1)."""

    __slots__ = ("re", "jc")

    def __init__(self, re=0, jc=0):
        self.re = Fraction(re)
        self.jc = Fraction(jc)

    @classmethod
    def coerce(cls, value) -> "CycloRational":
        if isinstance(value, CycloRational):
            return value
        return cls(value, 0)

    def __add__(self, other):
        other = CycloRational.coerce(other)
        return CycloRational(self.re + other.re, self.jc + other.jc)

    __radd__ = __add__

    def __neg__(self):
        return CycloRational(-self.re, -self.jc)

    def __sub__(self, other):
        return self + (-CycloRational.coerce(other))

    def __rsub__(self, other):
        return CycloRational.coerce(other) - self

    def __mul__(self, other):
        other = CycloRational.coerce(other)
        a, b, c, d = self.re, self.jc, other.re, other.jc
        # j^2 = -1 - j
        return CycloRational(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        a, b = self.re, self.jc
        return a * a - a * b + b * b

    def conjugate(self) -> "CycloRational":
        # j -> j^2 = -1 - j
        return CycloRational(self.re - self.jc, -self.jc)

    def inverse(self) -> "CycloRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(j)")
        c = self.conjugate()
        return CycloRational(c.re / n, c.jc / n)

    def __truediv__(self, other):
        return self * CycloRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycloRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = CycloRational(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.re) or bool(self.jc)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloRational(other)
        if not isinstance(other, CycloRational):
            return NotImplemented
        return self.re == other.re and self.jc == other.jc

    def __lt__(self, other):
        # arbitrary total order, used only for deterministic sorting
        other = CycloRational.coerce(other)
        return (self.re, self.jc) < (other.re, other.jc)

    def __hash__(self):
        return hash((self.re, self.jc))

    def __repr__(self):
        return f"CycloRational({self.re}, {self.jc})"

    def __str__(self):
        return _format_cyclo(self.re, self.jc)


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _format_cyclo(re: Fraction, jc: Fraction) -> str:
    if jc == 0:
        return _format_rational(re)
    if jc == 1:
        jpart = "j"
    elif jc == -1:
        jpart = "-j"
    else:
        jpart = f"{_format_rational(jc)}*j"
    if re == 0:
        return jpart
    sep = "" if jpart.startswith("-") else "+"
    return f"({_format_rational(re)}{sep}{jpart})"


def _poly(d: Mapping[tuple, object]):
    return _CTX.from_dict(dict(d))


_P0 = _CTX.from_dict({})
_P1 = _CTX.constant(1)


def _canonical_triple(a, b, e):
    if e.is_zero():
        raise MalformedScalarError("zero denominator")
    if a.is_zero() and b.is_zero():
        return _P0, _P0, _P1
    if not e.is_constant():
        g = e.gcd(a).gcd(b)
        if not g.is_one():
            a, b, e = a / g, b / g, e / g
    lc = e.leading_coefficient()
    if lc != 1:
        inv = 1 / flint.fmpq(lc)
        a, b, e = a * inv, b * inv, e * inv
    return a, b, e


class Scalar:
    """Canonical element of Q(j)(q, p, q', k[, C1..C16]); immutable."""

    __slots__ = ("a", "b", "e", "_hash")

    def __init__(self, a=None, b=None, e=None, *, _canonical=False):
        a = _P0 if a is None else a
        b = _P0 if b is None else b
        e = _P1 if e is None else e
        if not _canonical:
            a, b, e = _canonical_triple(a, b, e)
        self.a, self.b, self.e = a, b, e
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def coerce(cls, value) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        if isinstance(value, CycloRational):
            return cls(_CTX.constant(flint.fmpq(value.re.numerator, value.re.denominator)),
                       _CTX.constant(flint.fmpq(value.jc.numerator, value.jc.denominator)),
                       _canonical=True)
        if isinstance(value, (int, Fraction)):
            value = Fraction(value)
            return cls(_CTX.constant(flint.fmpq(value.numerator, value.denominator)),
                       _canonical=True)
        if isinstance(value, str):
            return parse_scalar(value)
        raise TypeError(f"cannot make a Scalar from {type(value).__name__}")

    @classmethod
    def fraction(cls, num, den) -> "Scalar":
        """``num / den`` for scalar-like arguments; zero ``den`` is malformed."""
        num, den = cls.coerce(num), cls.coerce(den)
        if den.is_zero():
            raise MalformedScalarError("zero denominator")
        return num / den

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_one(self) -> bool:
        return self.b.is_zero() and self.e.is_one() and self.a.is_one()

    def is_constant(self) -> bool:
        return self.a.is_constant() and self.b.is_constant() and self.e.is_constant()

    def constant_value(self) -> CycloRational:
        if not self.is_constant():
            raise ValueError("scalar is not constant")
        e = Fraction(str(self.e.leading_coefficient()))
        return CycloRational(_const_fraction(self.a) / e, _const_fraction(self.b) / e)

    def variables(self) -> set[str]:
        used = set()
        for poly in (self.a, self.b, self.e):
            for i, deg in enumerate(poly.degrees()):
                if deg > 0:
                    used.add(VARIABLES[i])
        return used

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.e == other.e:
            return Scalar(self.a + other.a, self.b + other.b, self.e)
        return Scalar(self.a * other.e + other.a * self.e,
                      self.b * other.e + other.b * self.e,
                      self.e * other.e)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.e, _canonical=True)

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other
        a, b, e = self.a, self.b, self.e
        c, d, f = other.a, other.b, other.e
        if b.is_zero() and d.is_zero():
            num_a, num_b = a * c, _P0
        else:
            bd = b * d
            num_a, num_b = a * c - bd, a * d + b * c - bd
        return Scalar(num_a, num_b, e * f)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        a, b, e = self.a, self.b, self.e
        if b.is_zero():
            return Scalar(e, _P0, a)
        # (a + j b)^-1 = (a - b - j b) / (a^2 - a b + b^2)
        return Scalar(e * (a - b), -(e * b), a * a - a * b + b * b)

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.e == other.e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((
                tuple(sorted(self.a.to_dict().items())),
                tuple(sorted(self.b.to_dict().items())),
                tuple(sorted(self.e.to_dict().items())),
            ))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- substitution / evaluation ----------------------------------------
    def substitute(self, bindings: Mapping[str, object]) -> "Scalar":
        return substitute(self, bindings)

    def evaluate(self, point: Mapping[str, object]) -> CycloRational:
        """Value at a point (every used variable must be bound).

        Pure-Python evaluation; raises :class:`PoleError` on a vanishing
        denominator.
        """
        vals = [None] * _NVARS
        for name, v in point.items():
            vals[_INDEX[name]] = CycloRational.coerce(v)
        den = _eval_poly(self.e, vals)
        if not den:
            raise PoleError("denominator vanishes at evaluation point")
        num = _eval_poly(self.a, vals) + CycloRational(0, 1) * _eval_poly(self.b, vals)
        return num / den

    # -- printing ---------------------------------------------------------
    def numerator_terms(self):
        """``[(exponents, CycloRational)]`` of ``a + j b``, in lex order."""
        terms = {}
        for exps, c in self.a.terms():
            terms[exps] = CycloRational(Fraction(int(c.p), int(c.q)), 0)
        for exps, c in self.b.terms():
            prev = terms.get(exps, CycloRational())
            terms[exps] = CycloRational(prev.re, Fraction(int(c.p), int(c.q)))
        return sorted(terms.items(), key=lambda t: t[0], reverse=True)

    def __str__(self):
        num = _format_poly(self.numerator_terms())
        if self.e.is_one():
            return num
        den_terms = [(exps, CycloRational(Fraction(int(c.p), int(c.q)))) for exps, c in self.e.terms()]
        den = _format_poly(den_terms)
        if len(self.numerator_terms()) > 1:
            num = f"({num})"
        if len(den_terms) > 1 or not _is_bare_power(den_terms[0]):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"Scalar('{self}')"

    def is_atomic_text(self) -> bool:
        """True when the printed form can be followed by ``*word`` unparenthesized."""
        if not self.e.is_one():
            return False
        terms = self.numerator_terms()
        if len(terms) != 1:
            return False
        c = terms[0][1]
        return c.jc == 0 and c.re.denominator == 1


def _is_bare_power(term) -> bool:
    exps, c = term
    return c == 1 and sum(1 for x in exps if x) == 1


def _const_fraction(poly) -> Fraction:
    if poly.is_zero():
        return Fraction(0)
    return Fraction(str(poly.leading_coefficient()))


def _coerce_or_none(value):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction, CycloRational)):
        return Scalar.coerce(value)
    return None


def _format_monomial(exps) -> str:
    parts = []
    for name, e in zip(VARIABLES, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _format_poly(terms) -> str:
    if not terms:
        return "0"
    out = []
    for idx, (exps, c) in enumerate(terms):
        mono = _format_monomial(exps)
        if c.jc == 0:
            neg = c.re < 0
            mag = -c.re if neg else c.re
            if mono:
                body = mono if mag == 1 else f"{_format_rational(mag)}*{mono}"
            else:
                body = _format_rational(mag)
        else:
            neg = False
            cs = _format_cyclo(c.re, c.jc)
            if cs.startswith("-") and not cs.startswith("("):
                neg, cs = True, cs[1:]
            if mono:
                body = f"{cs}*{mono}" if cs != "j" else f"j*{mono}"
            else:
                body = cs
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _eval_poly(poly, vals) -> CycloRational:
    total = CycloRational()
    for exps, c in poly.terms():
        term = CycloRational(Fraction(int(c.p), int(c.q)))
        for i, e in enumerate(exps):
            if e:
                e = int(e)
                if vals[i] is None:
                    raise KeyError(f"no value for variable {VARIABLES[i]}")
                term = term * vals[i] ** e
        total = total + term
    return total


def var(name: str) -> Scalar:
    if name not in _INDEX:
        raise KeyError(f"unknown scalar variable {name!r}")
    exps = [0] * _NVARS
    exps[_INDEX[name]] = 1
    return Scalar(_poly({tuple(exps): 1}), _canonical=True)


ZERO = Scalar(_canonical=True)
ONE = Scalar(_P1, _canonical=True)
J = Scalar(_P0, _P1, _P1, _canonical=True)


def canonical(s) -> Scalar:
    """Canonical representative; idempotent.

    Accepts a :class:`Scalar` or a ``(num, den)`` pair of scalar-likes.
    """
    if isinstance(s, tuple):
        return Scalar.fraction(*s)
    if isinstance(s, Scalar):
        return Scalar(s.a, s.b, s.e)
    return Scalar.coerce(s)


def _eval_poly_scalar(poly, images, cache) -> Scalar:
    total = ZERO
    for exps, c in poly.terms():
        term = Scalar.coerce(Fraction(int(c.p), int(c.q)))
        for i, e in enumerate(exps):
            if e:
                e = int(e)
                key = (i, e)
                pw = cache.get(key)
                if pw is None:
                    pw = cache[key] = images[i] ** e
                term = term * pw
        total = total + term
    return total


def substitute(s: Scalar, bindings: Mapping[str, object]) -> Scalar:
    """Simultaneous substitution ``{variable: scalar-like}``.

    String values are parsed as scalar text.  Raises :class:`PoleError` if
    the denominator becomes identically zero.
    """
    if not bindings:
        return s
    images = [var(name) for name in VARIABLES]
    for name, value in bindings.items():
        if name not in _INDEX:
            raise KeyError(f"unknown scalar variable {name!r}")
        images[_INDEX[name]] = Scalar.coerce(value)
    cache: dict = {}
    den = _eval_poly_scalar(s.e, images, cache)
    if den.is_zero():
        raise PoleError(f"substitution {dict(bindings)} makes the denominator of {s} vanish")
    num = _eval_poly_scalar(s.a, images, cache) + J * _eval_poly_scalar(s.b, images, cache)
    return num / den


def random_point(names: Iterable[str], rng: random.Random) -> dict[str, Fraction]:
    return {n: Fraction(rng.randint(1, 97), rng.randint(1, 97)) for n in names}


def is_zero_randomized(s: Scalar, trials: int = 5, rng: random.Random | None = None) -> bool:
    """Probabilistic zero test by evaluation at random rational points.

    Only a cross-check: canonical-form equality is authoritative.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng or random.Random()
    names = sorted(s.variables())
    done = 0
    while done < trials:
        point = random_point(names, rng)
        try:
            value = s.evaluate(point)
        except PoleError:
            continue
        if value:
            return False
        done += 1
    return True


# -- text syntax -------------------------------------------------------------

ScalarLike = Union[Scalar, CycloRational, int, Fraction, str]


def _scalar_symbol(sym: syntax.Sym) -> Scalar:
    if sym.name == "j":
        return J
    if sym.name in _INDEX:
        return var(sym.name)
    raise syntax.ParseError(f"unknown scalar symbol {sym.name!r}", sym.pos)


def _scalar_divide(x: Scalar, y: Scalar) -> Scalar:
    if y.is_zero():
        raise MalformedScalarError("division by zero in scalar text")
    return x / y


def _scalar_power(x: Scalar, n: int) -> Scalar:
    if n < 0 and x.is_zero():
        raise MalformedScalarError("negative power of zero")
    return x ** n


_SCALAR_EVAL = syntax.Evaluator(
    number=lambda n: Scalar.coerce(n),
    symbol=_scalar_symbol,
    divide=_scalar_divide,
    power=_scalar_power,
)


def parse_scalar(text: str) -> Scalar:
    """Parse scalar text such as ``(j^2*q*p-1)/(1+q*p)`` or ``q^-1``."""
    return _SCALAR_EVAL(syntax.parse(text))
