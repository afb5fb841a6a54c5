"""Graded exterior differential with (-1)- or j-weighted Leibniz rule.

On a word ``g1 g2 ... gn`` the differential is the free-algebra derivation

    d(g w) = d(g) w + sign(g) g d(w),   sign(g) = (-1)**parity(g) * base**degree(g)

with ``base = -1`` for d^2 = 0 and ``base = j`` for d^3 = 0, followed by
normalization in the presentation.  In presentations that are not confluent
the result inherits the leftmost-redex convention of :func:`normalize`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    Element,
    Presentation,
    Word,
    critical_pairs,
    element_to_json,
    multiply,
    normalize,
)
from .presets import definition, preset, specialize
from .scalar import J, ONE, Scalar


@dataclass
class CalculusSpec:
    presentation: Presentation
    nilpotency: int
    dmap: dict[int, Element]
    signbase: Scalar
    name: str = ""

    def __post_init__(self):
        P = self.presentation
        if self.nilpotency not in (2, 3):
            raise ValueError("nilpotency must be 2 or 3")
        for g in P.generators:
            img = self.dmap.get(g.rank)
            if img is None:
                raise ValueError(f"dmap has no image for {g.name}")
            for w in img.terms:
                if P.degree(w) != g.degree + 1:
                    raise ValueError(f"d({g.name}) does not raise the degree by one")
        for g in P.generators:
            e = Element.word((g.rank,))
            for _ in range(self.nilpotency):
                e = self._apply_dmap(e)
            if not e.is_zero():
                raise ValueError(f"d^{self.nilpotency}({g.name}) is not zero on generators")

    def _apply_dmap(self, e: Element) -> Element:
        out = Element()
        for w, c in e.terms.items():
            (g,) = w
            out = out + self.dmap[g].scale(c)
        return out

    def sign(self, w: Word) -> Scalar:
        P = self.presentation
        deg, par = P.degree(w), P.parity(w)
        s = self.signbase ** deg
        return -s if par else s


def _chain_dmap(P: Presentation) -> dict[int, Element]:
    """x -> dx -> d2x -> 0 by name; everything else (group entries) -> 0."""
    dmap = {}
    for g in P.generators:
        if g.degree == 0 and ("d" + g.name) in P.index:
            target = "d" + g.name
        elif g.degree == 1 and ("d2" + g.name[1:]) in P.index:
            target = "d2" + g.name[1:]
        else:
            target = None
        dmap[g.rank] = Element.word((P.index[target],)) if target else Element()
    return dmap


def calculus_for(P: Presentation, nilpotency: int, name: str = "") -> CalculusSpec:
    base = Scalar.coerce(-1) if nilpotency == 2 else J
    return CalculusSpec(P, nilpotency, _chain_dmap(P), base, name or P.name)


def calculus(preset_id: str, bindings: Mapping[str, object] | None = None) -> CalculusSpec:
    """Calculus of a shipped preset, optionally specialized."""
    defn = definition(preset_id)
    if not defn.nilpotency:
        raise ValueError(f"{preset_id} is not a differential calculus preset")
    P = preset(preset_id)
    if bindings:
        P = specialize(P, bindings)
    return calculus_for(P, defn.nilpotency, P.name)


def d_free(e: Element, C: CalculusSpec) -> Element:
    """Differential in the free algebra (no rewriting)."""
    out: dict[Word, Scalar] = {}
    for w, c in e.terms.items():
        sign = ONE
        for i, g in enumerate(w):
            img = C.dmap[g]
            if img.terms:
                prefix, suffix = w[:i], w[i + 1:]
                for gw, gc in img.terms.items():
                    nw = prefix + gw + suffix
                    v = c * sign * gc
                    prev = out.get(nw)
                    out[nw] = v if prev is None else prev + v
            sign = sign * C.sign((g,))
    return Element(out)


def d(e: Element, C: CalculusSpec, times: int = 1) -> Element:
    """Apply the differential ``times`` times, normalizing after each."""
    for _ in range(times):
        e = normalize(d_free(e, C), C.presentation)
    return e


@dataclass
class Report:
    status: str
    checked: int = 0
    witness: Element | None = None
    counterexamples: list[Element] = field(default_factory=list)
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, P: Presentation) -> dict:
        return {
            "status": self.status,
            "checked": self.checked,
            "witness": element_to_json(self.witness, P) if self.witness is not None else None,
            "counterexamples": [element_to_json(e, P) for e in self.counterexamples],
            "details": list(self.details),
        }


def random_word(P: Presentation, rng: random.Random, min_len: int, max_len: int) -> Word:
    n = len(P.generators)
    return tuple(rng.randrange(n) for _ in range(rng.randint(min_len, max_len)))


def check_nilpotency(
    C: CalculusSpec,
    max_len: int = 4,
    samples: int = 200,
    sample_max_len: int = 6,
    seed: int = 0,
) -> Report:
    """d^n = 0 on all normal words up to ``max_len`` plus random longer words.

    The witness is ``d^(n-1)`` of the first coordinate, which must be nonzero.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    P = C.presentation
    n = C.nilpotency
    rng = random.Random(seed)
    words = P.normal_words(max_len)
    elements = [Element.word(w) for w in words]
    for _ in range(samples):
        w = random_word(P, rng, max_len + 1, max(max_len + 1, sample_max_len))
        elements.append(normalize(Element.word(w), P))
    report = Report("pass")
    for e in elements:
        report.checked += 1
        result = d(e, C, n)
        if not result.is_zero():
            report.status = "fail"
            report.counterexamples.append(e)
            report.details.append(f"d^{n}({P.format(e)}) = {P.format(result)}")
            break
    coords = [g for g in P.generators if g.degree == 0 and not C.dmap[g.rank].is_zero()]
    if coords:
        witness = d(Element.word((coords[0].rank,)), C, n - 1)
        report.witness = witness
        if witness.is_zero():
            report.status = "fail"
            report.details.append(f"d^{n - 1}({coords[0].name}) vanishes")
    return report


def leibniz_defect(u: Element, v: Element, C: CalculusSpec) -> Element:
    """d(u v) - (d(u) v + sign(u) u d(v)) for a homogeneous word ``u``."""
    P = C.presentation
    lhs = d(multiply(u, v, P), C)
    (uw,) = u.terms
    rhs = multiply(d(u, C), v, P) + multiply(u, d(v, C), P).scale(C.sign(uw) * u.terms[uw])
    return lhs - rhs


def check_leibniz(
    C: CalculusSpec,
    samples: int = 100,
    max_len: int = 3,
    seed: int = 0,
    pairs: Sequence[tuple[Element, Element]] | None = None,
) -> Report:
    """Compare d(u*v) with d(u)*v + sign(u)*u*d(v) on sampled normal words.

    Products are left folds with immediate normalization.  A failing sample
    is reported together with the number of critical-pair obstructions, which
    is where a non-associative regime shows up.
    """
    if samples < 1 and not pairs:
        raise ValueError("samples must be >= 1")
    P = C.presentation
    rng = random.Random(seed)
    if pairs is None:
        words = [w for w in P.normal_words(max_len) if w]
        pairs = [
            (Element.word(rng.choice(words)), Element.word(rng.choice(words)))
            for _ in range(samples)
        ]
    report = Report("pass")
    for u, v in pairs:
        report.checked += 1
        defect = leibniz_defect(u, v, C)
        if not defect.is_zero():
            report.status = "fail"
            report.counterexamples.append(u.concat(v))
            report.details.append(
                f"u={P.format(u)}, v={P.format(v)}: defect {P.format(defect)}"
            )
    if report.status == "fail":
        report.details.append(f"critical-pair obstructions: {len(critical_pairs(P))}")
    return report


def check_relations_closed(C: CalculusSpec) -> Report:
    """normalize(d(L - R)) = 0 for every displayed relation."""
    P = C.presentation
    report = Report("pass")
    for rel in P.relations:
        report.checked += 1
        res = d(rel.difference(), C)
        if not res.is_zero():
            report.status = "fail"
            report.counterexamples.append(rel.difference())
            report.details.append(f"{rel.label}: d gives {P.format(res)}")
    return report
