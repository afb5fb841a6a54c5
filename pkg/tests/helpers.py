import random
from fractions import Fraction

from ncdiff import syntax
from ncdiff.scalar import CycloRational, PoleError

LEAVES = ("q", "p", "q'", "k", "j", "1", "2", "3")


def random_tree(rng: random.Random, depth: int = 3) -> str:
    """Random scalar expression text over q, p, q', k, j."""
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(LEAVES)
    op = rng.choice("+-*/^")
    if op == "^":
        return f"({random_tree(rng, depth - 1)})^{rng.randint(0, 3)}"
    return f"({random_tree(rng, depth - 1)}){op}({random_tree(rng, depth - 1)})"


def evaluate_text(text: str, point: dict) -> CycloRational:
    """Evaluate scalar text directly in Q(j), never forming a rational function."""

    def symbol(sym):
        if sym.name == "j":
            return CycloRational(0, 1)
        return CycloRational(point[sym.name])

    def divide(x, y):
        if not y:
            raise PoleError("zero divisor")
        return x / y

    def power(x, n):
        if n < 0 and not x:
            raise PoleError("zero divisor")
        return x ** n

    ev = syntax.Evaluator(
        number=lambda n: CycloRational(n), symbol=symbol, divide=divide, power=power
    )
    return ev(syntax.parse(text))


def random_rational_point(rng: random.Random) -> dict:
    return {n: Fraction(rng.randint(1, 50), rng.randint(1, 50)) for n in ("q", "p", "q'", "k")}
