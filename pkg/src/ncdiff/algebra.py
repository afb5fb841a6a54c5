"""Graded noncommutative words, elements, rewrite presentations.

Words are tuples of generator ranks.  A :class:`Presentation` holds oriented
rules ``lhs -> rhs`` whose right-hand sides are strictly smaller than the
left-hand side in deg-lex order (shorter first, then lexicographic by rank),
so rewriting always terminates.  Normal forms are memoized per presentation
and per strategy.

When the rule set is not confluent the result of :func:`normalize` depends
on the strategy; the default (leftmost redex) is the convention used
everywhere else in the package, and :func:`critical_pairs` is the only place
where the ambiguity is reported.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar, parse_scalar, substitute

Word = tuple[int, ...]

LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"
STRATEGIES = (LEFTMOST, RIGHTMOST)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    rank: int
    degree: int = 0
    parity: int = 0


def word_key(w: Word):
    return (len(w), w)


class Element:
    """Finite linear combination of words with scalar coefficients.

    ``*`` between elements is free concatenation (no rewriting); use
    :func:`multiply` or :func:`normalize` for products in a presentation.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Scalar] | None = None):
        clean = {}
        if terms:
            for w, c in terms.items():
                if not isinstance(c, Scalar):
                    c = Scalar.coerce(c)
                if not c.is_zero():
                    clean[tuple(w)] = c
        self.terms = clean

    @classmethod
    def word(cls, w: Iterable[int], coeff=ONE) -> "Element":
        return cls({tuple(w): coeff})

    @classmethod
    def scalar(cls, c) -> "Element":
        return cls({(): c})

    @classmethod
    def _raw(cls, terms: dict) -> "Element":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Word, Scalar]]:
        return iter(sorted(self.terms.items(), key=lambda t: word_key(t[0])))

    def __len__(self):
        return len(self.terms)

    def coefficient(self, w: Word) -> Scalar:
        return self.terms.get(tuple(w), ZERO)

    def scalar_part(self) -> Scalar | None:
        """The coefficient if this element is a pure scalar, else None."""
        if not self.terms:
            return ZERO
        if set(self.terms) == {()}:
            return self.terms[()]
        return None

    def __add__(self, other):
        if not isinstance(other, Element):
            other = Element.scalar(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return Element._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Element):
            other = Element.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return Element.scalar(other) - self

    def scale(self, c) -> "Element":
        c = Scalar.coerce(c)
        if c.is_zero():
            return Element()
        if c.is_one():
            return self
        return Element._raw({w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Element):
            return self.concat(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def concat(self, other: "Element") -> "Element":
        out: dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                prev = out.get(w)
                out[w] = c if prev is None else prev + c
        return Element(out)

    def map_coefficients(self, fn) -> "Element":
        return Element({w: fn(c) for w, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = Element.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        inner = ", ".join(f"{w}: {c}" for w, c in self)
        return f"Element({{{inner}}})"


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: Element
    note: str = ""


@dataclass(frozen=True)
class Relation:
    """A displayed identity ``lhs = rhs`` kept verbatim for checking."""

    label: str
    lhs: Element
    rhs: Element

    def difference(self) -> Element:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Obstruction:
    overlap: Word
    difference: Element
    rules: tuple[Word, Word] = ()


class Presentation:
    """Generators, oriented rules and parameter set of one algebra.

    Immutable after construction apart from internal normal-form caches.
    """

    def __init__(
        self,
        generators: Sequence[Generator],
        rules: Iterable[RewriteRule],
        params: Iterable[str] = (),
        notes: Iterable[str] = (),
        *,
        name: str = "",
        relations: Iterable[Relation] = (),
        free_pairs: Iterable[tuple[str, str]] = (),
    ):
        self.name = name
        self.generators = tuple(generators)
        for i, g in enumerate(self.generators):
            if g.rank != i:
                raise PresentationError(f"generator {g.name} has rank {g.rank}, expected {i}")
        self.index = {g.name: g.rank for g in self.generators}
        if len(self.index) != len(self.generators):
            raise PresentationError("duplicate generator name")
        self.params = tuple(params)
        self.notes = tuple(notes)
        self.relations = tuple(relations)
        self.free_pairs = frozenset(
            (self.index[a], self.index[b]) for a, b in free_pairs
        )
        self.rules: dict[Word, RewriteRule] = {}
        for rule in rules:
            self._add_rule(rule)
        self.lengths = sorted({len(lhs) for lhs in self.rules})
        self._check_complete()
        self._nf_cache: dict[str, dict[Word, dict[Word, Scalar]]] = {s: {} for s in STRATEGIES}

    # -- validation -------------------------------------------------------
    def _add_rule(self, rule: RewriteRule):
        n = len(self.generators)
        for g in rule.lhs:
            if not 0 <= g < n:
                raise PresentationError(f"rule lhs uses unknown generator rank {g}")
        if len(rule.lhs) < 2:
            raise PresentationError("rule lhs must have length >= 2")
        if rule.lhs in self.rules:
            raise PresentationError(f"duplicate rule for {self.word_str(rule.lhs)}")
        key = word_key(rule.lhs)
        for w in rule.rhs.terms:
            for g in w:
                if not 0 <= g < n:
                    raise PresentationError(f"rule rhs uses unknown generator rank {g}")
            if word_key(w) >= key:
                raise PresentationError(
                    f"rule {self.word_str(rule.lhs)} -> ... violates the termination "
                    f"order: {self.word_str(w)} is not smaller"
                )
        self.rules[rule.lhs] = rule

    def _check_complete(self):
        n = len(self.generators)
        for i in range(n):
            for k in range(i):
                if (i, k) not in self.rules and (i, k) not in self.free_pairs:
                    raise PresentationError(
                        f"no reordering rule for {self.generators[i].name}*{self.generators[k].name}"
                    )

    # -- lookup / printing ------------------------------------------------
    def gen(self, name: str) -> Generator:
        try:
            return self.generators[self.index[name]]
        except KeyError:
            raise PresentationError(f"unknown generator {name!r}") from None

    def word(self, *names: str) -> Word:
        return tuple(self.gen(n).rank for n in names)

    def element(self, *names: str, coeff=ONE) -> Element:
        return Element.word(self.word(*names), coeff)

    def degree(self, w: Word) -> int:
        return sum(self.generators[g].degree for g in w)

    def parity(self, w: Word) -> int:
        return sum(self.generators[g].parity for g in w) % 2

    def word_str(self, w: Word) -> str:
        return "*".join(self.generators[g].name for g in w) if w else "1"

    def format(self, e: Element) -> str:
        return format_element(e, self)

    def is_normal(self, w: Word) -> bool:
        return self._find_redex(w, LEFTMOST) is None

    def __repr__(self):
        return f"<Presentation {self.name or '?'}: {len(self.generators)} generators, {len(self.rules)} rules>"

    # -- rewriting --------------------------------------------------------
    def _find_redex(self, w: Word, strategy: str):
        n = len(w)
        rules = self.rules
        if strategy == LEFTMOST:
            positions = range(n)
        else:
            positions = range(n - 1, -1, -1)
        for i in positions:
            for length in self.lengths:
                if i + length > n:
                    break
                rule = rules.get(w[i:i + length])
                if rule is not None:
                    return i, rule
        return None

    def normal_form(self, w: Word, strategy: str = LEFTMOST) -> dict[Word, Scalar]:
        cache = self._nf_cache[strategy]
        hit = cache.get(w)
        if hit is not None:
            return hit
        redex = self._find_redex(w, strategy)
        if redex is None:
            result = {w: ONE}
        else:
            pos, rule = redex
            prefix, suffix = w[:pos], w[pos + len(rule.lhs):]
            acc: dict[Word, Scalar] = {}
            for rw, c in rule.rhs.terms.items():
                for w2, c2 in self.normal_form(prefix + rw + suffix, strategy).items():
                    v = c * c2
                    prev = acc.get(w2)
                    acc[w2] = v if prev is None else prev + v
            result = {k: v for k, v in acc.items() if not v.is_zero()}
        cache[w] = result
        return result

    def rewrite_once(self, w: Word, pos: int, lhs: Word) -> Element:
        """Apply the rule with left side ``lhs`` at ``pos`` (no further rewriting)."""
        rule = self.rules[lhs]
        if w[pos:pos + len(lhs)] != lhs:
            raise ValueError("rule does not match at that position")
        prefix, suffix = w[:pos], w[pos + len(lhs):]
        return Element({prefix + rw + suffix: c for rw, c in rule.rhs.terms.items()})

    def normal_words(self, max_len: int) -> list[Word]:
        """All normal words of length <= max_len, in deg-lex order."""
        out: list[Word] = [()]
        layer: list[Word] = [()]
        n = len(self.generators)
        for _ in range(max_len):
            nxt = []
            for w in layer:
                for g in range(n):
                    w2 = w + (g,)
                    # a word is normal iff no rule matches a factor; only suffixes are new
                    if any(w2[-length:] in self.rules for length in self.lengths if length <= len(w2)):
                        continue
                    nxt.append(w2)
            out.extend(nxt)
            layer = nxt
        return out


def normalize(e: Element, P: Presentation, strategy: str = LEFTMOST) -> Element:
    """Fixpoint of rule application (leftmost redex first by default)."""
    acc: dict[Word, Scalar] = {}
    for w, c in e.terms.items():
        for w2, c2 in P.normal_form(w, strategy).items():
            v = c * c2
            prev = acc.get(w2)
            acc[w2] = v if prev is None else prev + v
    return Element(acc)


def multiply(e1: Element, e2: Element, P: Presentation) -> Element:
    return normalize(e1.concat(e2), P)


def fold_product(elements: Sequence[Element], P: Presentation) -> Element:
    """Left-to-right product with normalization after every step."""
    it = iter(elements)
    acc = next(it, Element.scalar(ONE))
    acc = normalize(acc, P)
    for e in it:
        acc = multiply(acc, e, P)
    return acc


def overlaps(P: Presentation) -> list[tuple[Word, Word, int, Word, int]]:
    """Ambiguities ``(word, lhs1, pos1, lhs2, pos2)`` between rule left sides.

    Covers proper suffix/prefix overlaps and inclusions.
    """
    found = []
    seen = set()
    lhss = sorted(P.rules, key=word_key)
    for l1, l2 in itertools.product(lhss, repeat=2):
        for k in range(1, min(len(l1), len(l2))):
            if l1[-k:] == l2[:k]:
                w = l1 + l2[k:]
                key = (w, l1, 0, l2, len(l1) - k)
                if key not in seen:
                    seen.add(key)
                    found.append(key)
        if l1 != l2 and len(l2) < len(l1):
            for pos in range(len(l1) - len(l2) + 1):
                if l1[pos:pos + len(l2)] == l2:
                    key = (l1, l1, 0, l2, pos)
                    if key not in seen:
                        seen.add(key)
                        found.append(key)
    return found


def critical_pairs(P: Presentation) -> list[Obstruction]:
    """Overlaps whose two one-step reductions have different normal forms.

    An empty result means the rule set is locally confluent, hence (being
    terminating) confluent: normal words form a basis and the product is
    associative.
    """
    out = []
    for w, l1, p1, l2, p2 in overlaps(P):
        a = normalize(P.rewrite_once(w, p1, l1), P)
        b = normalize(P.rewrite_once(w, p2, l2), P)
        diff = a - b
        if not diff.is_zero():
            out.append(Obstruction(w, diff, (l1, l2)))
    return out


def specialize_element(e: Element, bindings: Mapping[str, object]) -> Element:
    return e.map_coefficients(lambda c: substitute(c, bindings))


# -- printing / JSON ---------------------------------------------------------

def format_coefficient(c: Scalar) -> str:
    s = str(c)
    return s if c.is_atomic_text() else f"({s})"


def format_element(e: Element, P: Presentation) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for w, c in e:
        ws = P.word_str(w) if w else ""
        if not w:
            text = format_coefficient(c)
            if text.startswith("-"):
                parts.append(("-", text[1:]))
            else:
                parts.append(("+", text))
            continue
        if c.is_one():
            parts.append(("+", ws))
        elif (-c).is_one():
            parts.append(("-", ws))
        else:
            text = format_coefficient(c)
            if text.startswith("-"):
                parts.append(("-", f"{text[1:]}*{ws}"))
            else:
                parts.append(("+", f"{text}*{ws}"))
    out = []
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def element_to_json(e: Element, P: Presentation) -> dict:
    return {"terms": [
        {"coeff": str(c), "word": [P.generators[g].name for g in w]} for w, c in e
    ]}


def element_from_json(data: Mapping, P: Presentation) -> Element:
    terms = data["terms"] if isinstance(data, Mapping) else data
    out = Element()
    for t in terms:
        out = out + Element.word(P.word(*t["word"]), parse_scalar(str(t["coeff"])))
    return out


def presentation_to_json(P: Presentation) -> dict:
    doc = {
        "name": P.name,
        "generators": [
            {"name": g.name, "degree": g.degree, "parity": g.parity} for g in P.generators
        ],
        "rules": [
            {
                "lhs": [P.generators[g].name for g in lhs],
                "rhs": element_to_json(rule.rhs, P)["terms"],
                **({"note": rule.note} if rule.note else {}),
            }
            for lhs, rule in sorted(P.rules.items(), key=lambda t: word_key(t[0]))
        ],
        "params": list(P.params),
        "notes": list(P.notes),
    }
    if P.free_pairs:
        doc["free"] = [
            [P.generators[a].name, P.generators[b].name] for a, b in sorted(P.free_pairs)
        ]
    if P.relations:
        doc["relations"] = [
            {
                "label": r.label,
                "lhs": element_to_json(r.lhs, P)["terms"],
                "rhs": element_to_json(r.rhs, P)["terms"],
            }
            for r in P.relations
        ]
    return doc


def load_presentation(spec: Mapping | str) -> Presentation:
    """Build and validate a presentation from its JSON description.

    ``spec`` may be a mapping or a JSON string.  Raises
    :class:`PresentationError` on unknown generators, rules that do not
    decrease in deg-lex order, duplicate rules or missing reordering rules.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    gens = [
        Generator(g["name"], i, int(g.get("degree", 0)), int(g.get("parity", 0)))
        for i, g in enumerate(spec["generators"])
    ]
    index = {g.name: g.rank for g in gens}

    def names_to_word(names):
        try:
            return tuple(index[n] for n in names)
        except KeyError as exc:
            raise PresentationError(f"unknown generator {exc.args[0]!r}") from None

    def terms_to_element(terms):
        out: dict[Word, Scalar] = {}
        for t in terms:
            w = names_to_word(t["word"])
            c = parse_scalar(str(t["coeff"]))
            out[w] = out.get(w, ZERO) + c
        return Element(out)

    rules = [
        RewriteRule(names_to_word(r["lhs"]), terms_to_element(r.get("rhs", [])), r.get("note", ""))
        for r in spec.get("rules", [])
    ]
    relations = [
        Relation(r.get("label", ""), terms_to_element(r["lhs"]), terms_to_element(r["rhs"]))
        for r in spec.get("relations", [])
    ]
    free = [tuple(pair) for pair in spec.get("free", [])]
    for a, b in free:
        names_to_word([a, b])
    return Presentation(
        gens,
        rules,
        spec.get("params", []),
        spec.get("notes", []),
        name=spec.get("name", ""),
        relations=relations,
        free_pairs=free,
    )
