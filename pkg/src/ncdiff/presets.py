"""Named algebras: quantum planes, superplanes, their calculi and symmetry groups.

Every preset is written down as the list of identities it is defined by, in
the form they are usually displayed (``y*dx = (1/(p*q) - 1)*dy*x + 1/q*dx*y``).
Rewrite rules are obtained by orienting each identity towards its largest
word, so the right-hand sides as displayed become the normal forms.

Generator order (lowest rank first): group entries, then differentials from
the highest order down, then coordinates, x-type before y/theta-type.

Parity is the Grassmann parity of the underlying coordinate (theta, dtheta
and d2theta are odd); the sign a generator contributes to the Leibniz rule
is ``(-1)**parity * base**degree``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping

from .algebra import (
    Element,
    Generator,
    Presentation,
    PresentationError,
    Relation,
    RewriteRule,
    critical_pairs,
    load_presentation,
    presentation_to_json,
    specialize_element,
    word_key,
)
from .parsing import parse_relation
from .scalar import PoleError, Scalar

CALCULUS_IDS = (
    "plane-pq-d2",
    "plane-q-d2",
    "plane-pq-d3",
    "splane-q-d2",
    "splane-q-d3",
    "splane-pq-d2",
    "splane-pq-d3",
)
GROUP_IDS = ("gl-pq-2", "gl-q-11", "gl-pq-11")
PRESET_IDS = CALCULUS_IDS + GROUP_IDS


class UnknownPresetError(KeyError):
    pass


class SpecializationError(ValueError):
    pass


@dataclass(frozen=True)
class PresetDef:
    generators: tuple[tuple[str, int, int], ...]  # (name, degree, parity)
    relations: tuple[str, ...]
    params: tuple[str, ...]
    note: str
    nilpotency: int = 0  # 0 for groups
    coordinates: tuple[str, ...] = ()


_PLANE_D2_GENS = (("dy", 1, 0), ("dx", 1, 0), ("x", 0, 0), ("y", 0, 0))
_PLANE_D3_GENS = (("d2y", 2, 0), ("d2x", 2, 0)) + _PLANE_D2_GENS
_SPLANE_D2_GENS = (("dtheta", 1, 1), ("dx", 1, 0), ("x", 0, 0), ("theta", 0, 1))
_SPLANE_D3_GENS = (("d2theta", 2, 1), ("d2x", 2, 0)) + _SPLANE_D2_GENS

_PLANE = ("x*y = q*y*x",)
_SUPERPLANE = ("x*theta = q*theta*x", "theta^2 = 0")

_DEFS: dict[str, PresetDef] = {
    "plane-pq-d2": PresetDef(
        _PLANE_D2_GENS,
        _PLANE + (
            "x*dx = 1/(p*q)*dx*x",
            "x*dy = 1/p*dy*x",
            "y*dy = 1/(p*q)*dy*y",
            "y*dx = (1/(p*q) - 1)*dy*x + 1/q*dx*y",
            "dx*dy = -1/p*dy*dx",
            "dx^2 = dy^2 = 0",
        ),
        ("q", "p"),
        "quantum plane xy = q yx with GL_{p,q}(2) symmetry; first-order calculus, d^2 = 0",
        nilpotency=2,
        coordinates=("x", "y"),
    ),
    "plane-q-d2": PresetDef(
        _PLANE_D2_GENS,
        _PLANE + (
            "x*dx = q^-2*dx*x",
            "x*dy = q^-1*dy*x",
            "y*dy = q^-2*dy*y",
            "y*dx = (q^-2 - 1)*dy*x + q^-1*dx*y",
            "dx*dy = -q^-1*dy*dx",
            "dx^2 = dy^2 = 0",
        ),
        ("q",),
        "quantum plane with GL_q(2) symmetry (two-parameter calculus at p = q), d^2 = 0",
        nilpotency=2,
        coordinates=("x", "y"),
    ),
    "plane-pq-d3": PresetDef(
        _PLANE_D3_GENS,
        _PLANE + (
            "x*dx = j^2*dx*x",
            "x*dy = -j*q/(1+q*p)*dy*x + (j^2*q*p-1)/(1+q*p)*dx*y",
            "y*dy = j^2*dy*y",
            "y*dx = (j^2-q*p)/(1+q*p)*dy*x - j*p/(1+q*p)*dx*y",
            "x*d2x = j^2*d2x*x",
            "x*d2y = -j*q/(1+q*p)*d2y*x + (j^2*q*p-1)/(1+q*p)*d2x*y",
            "y*d2y = j^2*d2y*y",
            "y*d2x = (j^2-q*p)/(1+q*p)*d2y*x - j*p/(1+q*p)*d2x*y",
            "dx*d2x = j*d2x*dx",
            "dx*d2y = -q/(1+q*p)*d2y*dx + (j*q*p-j^2)/(1+q*p)*d2x*dy",
            "dy*d2y = j*d2y*dy",
            "dy*d2x = (j-j^2*q*p)/(1+q*p)*d2y*dx - p/(1+q*p)*d2x*dy",
            "dx*dy = q*dy*dx",
            "d2x*d2y = q*d2y*d2x",
            # consequence of realizing d through partial derivatives
            "dx^3 = dy^3 = 0",
        ),
        ("q", "p"),
        "quantum plane with GL_{p,q}(2) symmetry; calculus with d^3 = 0, d^2 != 0",
        nilpotency=3,
        coordinates=("x", "y"),
    ),
    "splane-q-d2": PresetDef(
        _SPLANE_D2_GENS,
        _SUPERPLANE + (
            "x*dx = q^-2*dx*x",
            "x*dtheta = q^-1*dtheta*x",
            "theta*dtheta = dtheta*theta",
            "theta*dx = (1-q^-2)*dtheta*x - q^-1*dx*theta",
            "dx*dtheta = q^-1*dtheta*dx",
            "dx^2 = 0",
        ),
        ("q",),
        "quantum superplane with GL_q(1|1) symmetry; d^2 = 0",
        nilpotency=2,
        coordinates=("x", "theta"),
    ),
    "splane-q-d3": PresetDef(
        _SPLANE_D3_GENS,
        _SUPERPLANE + (
            "x*dx = j^2*dx*x",
            "x*dtheta = -j*q/(1+q^2)*dtheta*x + (j^2*q^2-1)/(1+q^2)*dx*theta",
            "theta*dtheta = dtheta*theta",
            "theta*dx = (q^2-j^2)/(1+q^2)*dtheta*x + j*q/(1+q^2)*dx*theta",
            "dx*dtheta = -q*dtheta*dx",
            "dtheta^2 = 0",
            "x*d2x = j^2*d2x*x",
            "x*d2theta = -j*q/(1+q^2)*d2theta*x + (j^2*q^2-1)/(1+q^2)*d2x*theta",
            "theta*d2theta = -d2theta*theta",
            "theta*d2x = (j^2-q^2)/(1+q^2)*d2theta*x - j*q/(1+q^2)*d2x*theta",
            "dx*d2x = j*d2x*dx",
            "dx*d2theta = q/(1+q^2)*d2theta*dx + (j*q^2-j^2)/(1+q^2)*d2x*dtheta",
            "dtheta*d2theta = j^2*d2theta*dtheta",
            "dtheta*d2x = (j^2*q^2-j)/(1+q^2)*d2theta*dx - q/(1+q^2)*d2x*dtheta",
            "d2x*d2theta = q*d2theta*d2x",
            "d2theta^2 = 0",
        ),
        ("q",),
        "quantum superplane with GL_q(1|1) symmetry; d^3 = 0, d^2 != 0",
        nilpotency=3,
        coordinates=("x", "theta"),
    ),
    "splane-pq-d2": PresetDef(
        _SPLANE_D2_GENS,
        _SUPERPLANE + (
            "x*dx = (q*p)^-1*dx*x",
            "x*dtheta = p^-1*dtheta*x",
            "theta*dtheta = dtheta*theta",
            "theta*dx = (1-(q*p)^-1)*dtheta*x - q^-1*dx*theta",
            "dx*dtheta = p^-1*dtheta*dx",
            "dx^2 = 0",
        ),
        ("q", "p"),
        "quantum superplane with GL_{p,q}(1|1) symmetry; d^2 = 0",
        nilpotency=2,
        coordinates=("x", "theta"),
    ),
    "splane-pq-d3": PresetDef(
        _SPLANE_D3_GENS,
        _SUPERPLANE + (
            "x*dx = j^2*dx*x",
            "x*dtheta = -j*q/(1+q*p)*dtheta*x + (j^2*q*p-1)/(1+q*p)*dx*theta",
            "theta*dtheta = dtheta*theta",
            "theta*dx = (q*p-j^2)/(1+q*p)*dtheta*x + j*p/(1+q*p)*dx*theta",
            "dx*dtheta = -q*dtheta*dx",
            "dtheta^2 = 0",
            "x*d2x = j^2*d2x*x",
            "x*d2theta = -j*q/(1+q*p)*d2theta*x + (j^2*q*p-1)/(1+q*p)*d2x*theta",
            "theta*d2theta = -d2theta*theta",
            "theta*d2x = (j^2-q*p)/(1+q*p)*d2theta*x - j*p/(1+q*p)*d2x*theta",
            "dx*d2x = j*d2x*dx",
            "dx*d2theta = q/(1+q*p)*d2theta*dx + (j*q*p-j^2)/(1+q*p)*d2x*dtheta",
            "dtheta*d2theta = j^2*d2theta*dtheta",
            "dtheta*d2x = (j^2*q*p-j)/(1+q*p)*d2theta*dx - p/(1+q*p)*d2x*dtheta",
            "d2x*d2theta = q*d2theta*d2x",
            "d2theta^2 = 0",
        ),
        ("q", "p"),
        "quantum superplane with GL_{p,q}(1|1) symmetry; d^3 = 0, d^2 != 0",
        nilpotency=3,
        coordinates=("x", "theta"),
    ),
    "gl-pq-2": PresetDef(
        (("a", 0, 0), ("b", 0, 0), ("c", 0, 0), ("dgen", 0, 0)),
        (
            "a*b = p*b*a",
            "c*dgen = p*dgen*c",
            "a*c = q'*c*a",
            "b*dgen = q'*dgen*b",
            "p*b*c = q'*c*b",
            "a*dgen - dgen*a = (p - 1/q')*b*c",
        ),
        ("p", "q'"),
        "two-parameter quantum group GL_{p,q'}(2); matrix entries a, b, c, dgen",
    ),
    "gl-q-11": PresetDef(
        (("a", 0, 0), ("beta", 0, 1), ("gamma", 0, 1), ("dgen", 0, 0)),
        (
            "a*beta = q*beta*a",
            "dgen*beta = q*beta*dgen",
            "a*gamma = q*gamma*a",
            "dgen*gamma = q*gamma*dgen",
            "beta*gamma + gamma*beta = 0",
            "beta^2 = gamma^2 = 0",
            "a*dgen - dgen*a = (q^-1 - q)*beta*gamma",
        ),
        ("q",),
        "quantum supergroup GL_q(1|1); beta, gamma odd",
    ),
    "gl-pq-11": PresetDef(
        (("a", 0, 0), ("beta", 0, 1), ("gamma", 0, 1), ("dgen", 0, 0)),
        (
            "a*beta = p*beta*a",
            "dgen*beta = p*beta*dgen",
            "a*gamma = q'*gamma*a",
            "dgen*gamma = q'*gamma*dgen",
            "p*beta*gamma + q'*gamma*beta = 0",
            "beta^2 = gamma^2 = 0",
            "a*dgen - dgen*a = (q'^-1 - p)*beta*gamma",
        ),
        ("p", "q'"),
        "two-parameter quantum supergroup GL_{p,q'}(1|1); beta, gamma odd",
    ),
}


class _Names:
    """Just enough of a presentation for the expression parser."""

    def __init__(self, gens):
        self.index = {g.name: g.rank for g in gens}


def orient(rel: Relation) -> RewriteRule:
    """Turn ``lhs = rhs`` into a rule rewriting its deg-lex largest word."""
    diff = rel.difference()
    if diff.is_zero():
        raise PresentationError(f"relation {rel.label!r} is trivial")
    lead = max(diff.terms, key=word_key)
    if len(lead) < 2:
        raise PresentationError(f"relation {rel.label!r} has no word of length >= 2")
    c = diff.terms[lead]
    rest = diff - Element.word(lead, c)
    return RewriteRule(lead, (-rest).scale(c.inverse()), rel.label)


def build(defn: PresetDef, name: str = "") -> Presentation:
    gens = [Generator(n, i, d, par) for i, (n, d, par) in enumerate(defn.generators)]
    names = _Names(gens)
    relations: list[Relation] = []
    for text in defn.relations:
        relations.extend(parse_relation(text, names, label=text))
    rules = [orient(r) for r in relations]
    return Presentation(
        gens, rules, defn.params, (defn.note,), name=name, relations=relations
    )


@lru_cache(maxsize=None)
def preset(preset_id: str) -> Presentation:
    """The validated presentation for a preset id (cached; treat as immutable)."""
    try:
        defn = _DEFS[preset_id]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {preset_id!r}; known: {', '.join(PRESET_IDS)}"
        ) from None
    spec = presentation_to_json(build(defn, preset_id))
    return load_presentation(spec)


def definition(preset_id: str) -> PresetDef:
    try:
        return _DEFS[preset_id]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {preset_id!r}") from None


def specialize(P: Presentation, bindings: Mapping[str, object], name: str | None = None) -> Presentation:
    """Substitute parameters in every rule and displayed relation.

    Raises :class:`SpecializationError` naming the offending rule if a
    coefficient acquires a pole.
    """
    bindings = {k: Scalar.coerce(v) for k, v in bindings.items()}
    rules = []
    for lhs, rule in P.rules.items():
        try:
            rhs = specialize_element(rule.rhs, bindings)
        except PoleError as exc:
            raise SpecializationError(
                f"rule {P.word_str(lhs)} -> {P.format(rule.rhs)} has a pole: {exc}"
            ) from None
        rules.append(RewriteRule(lhs, rhs, rule.note))
    relations = []
    for rel in P.relations:
        try:
            relations.append(Relation(
                rel.label,
                specialize_element(rel.lhs, bindings),
                specialize_element(rel.rhs, bindings),
            ))
        except PoleError as exc:
            raise SpecializationError(f"relation {rel.label!r} has a pole: {exc}") from None
    bound = ", ".join(f"{k}={v}" for k, v in bindings.items())
    params = tuple(sorted(
        set().union(*(c.variables() for r in rules for c in r.rhs.terms.values()))
        & {"q", "p", "q'", "k"}
    ))
    return Presentation(
        P.generators,
        rules,
        params,
        P.notes + (f"specialized at {bound}",),
        name=name if name is not None else f"{P.name}[{bound}]",
        relations=relations,
        free_pairs=[(P.generators[a].name, P.generators[b].name) for a, b in P.free_pairs],
    )


def rule_differences(P1: Presentation, P2: Presentation) -> list[str]:
    """Human-readable list of rule mismatches; empty iff the rule sets agree."""
    out = []
    if [g.name for g in P1.generators] != [g.name for g in P2.generators]:
        return ["generator lists differ"]
    for lhs in sorted(set(P1.rules) | set(P2.rules), key=word_key):
        r1, r2 = P1.rules.get(lhs), P2.rules.get(lhs)
        if r1 is None or r2 is None:
            out.append(f"{P1.word_str(lhs)}: present in only one presentation")
        elif r1.rhs != r2.rhs:
            out.append(f"{P1.word_str(lhs)}: {P1.format(r1.rhs)} vs {P2.format(r2.rhs)}")
    return out


def export_presets(directory: str | Path) -> list[Path]:
    """Write every preset as a JSON presentation file; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for pid in PRESET_IDS:
        path = directory / f"{pid}.json"
        path.write_text(json.dumps(presentation_to_json(preset(pid)), indent=2) + "\n")
        paths.append(path)
    return paths


def is_confluent(P: Presentation) -> bool:
    return not critical_pairs(P)
