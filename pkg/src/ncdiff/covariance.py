"""Quantum (super)group coactions on the (super)planes and their calculi.

The combined algebra has the group entries first, then the plane generators,
with a cross rule ``g*h -> c(g, h) * h*g`` for every plane generator ``g``
and group entry ``h``.  Cross coefficients of differentials follow from
differentiating the coordinate rule with group entries as d-constants:
``d^m(x) * h = c(x, h) * (-1)**(m * parity(h)) * h * d^m(x)``.

Covariance is tested by substituting the transformed generators into each
defining relation and reducing in the combined algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import flint

from .algebra import (
    Element,
    Generator,
    Presentation,
    Relation,
    RewriteRule,
    critical_pairs,
    normalize,
)
from .differential import CalculusSpec, calculus_for, d, d_free
from .presets import definition, preset, specialize
from .scalar import (
    ANSATZ_UNKNOWNS,
    ONE,
    VARIABLES,
    Scalar,
    _CTX,
    parse_scalar,
    substitute,
    var,
)


class CovarianceError(ValueError):
    pass


@dataclass(frozen=True)
class CrossTable:
    """Coefficients ``c`` in ``g*h = c*h*g`` (plane generator g, group entry h)."""

    entries: Mapping[tuple[str, str], Scalar]
    label: str = ""

    def specialize(self, bindings: Mapping[str, object]) -> "CrossTable":
        return CrossTable(
            {k: substitute(v, bindings) for k, v in self.entries.items()},
            self.label,
        )

    def with_entry(self, plane_gen: str, group_gen: str, value) -> "CrossTable":
        entries = dict(self.entries)
        entries[(plane_gen, group_gen)] = Scalar.coerce(value)
        return CrossTable(entries, self.label + f" [{plane_gen},{group_gen}]={value}")


def _table(rows: Mapping[str, Sequence[str]], group: Sequence[str], label: str) -> CrossTable:
    return CrossTable(
        {(g, h): parse_scalar(text) for g, row in rows.items() for h, text in zip(group, row)},
        label,
    )


_PLANE_GROUP = ("a", "b", "c", "dgen")
_SUPER_GROUP = ("a", "beta", "gamma", "dgen")


def plane_cross_table(general: bool = False) -> CrossTable:
    """Coordinate rows for GL_{p,q'}(2) acting on xy = q yx.

    ``general=True`` keeps q' and k free; otherwise q' = q and k = q/p.
    """
    if general:
        bracket = "(q - (p - 1/q')*k)"
        rows = {
            "x": ("1", "q/p", "q/q'", "q*k/q'"),
            "y": (
                "q*k/q'",
                f"q^2/p*{bracket}",
                f"q^2/q'*{bracket}",
                f"q^3/(q'*p)*{bracket}",
            ),
        }
        return _table(rows, _PLANE_GROUP, "plane, general q', k")
    rows = {
        "x": ("1", "q/p", "1", "q/p"),
        "y": ("q/p", "q^2/p^2", "q/p", "q^2/p^2"),
    }
    return _table(rows, _PLANE_GROUP, "plane, q' = q, k = q/p")


def superplane_cross_table(two_parameter: bool = True, general: bool = False) -> CrossTable:
    """Coordinate rows for the supergroup acting on x theta = q theta x."""
    if not two_parameter:
        rows = {"x": ("1", "1", "1", "1"), "theta": ("1", "-1", "-1", "1")}
        return _table(rows, _SUPER_GROUP, "superplane, one parameter")
    rows = {
        "x": ("k", "q/p*k", "q/q'*k", "q^2/(q'*p)*k"),
        "theta": (
            "q^2/(q'*p)*k",
            "-q^3/(q'*p^2)*k",
            "-q^3/(q'^2*p)*k",
            "q^4/(q'^2*p^2)*k",
        ),
    }
    table = _table(rows, _SUPER_GROUP, "superplane, two parameters")
    if general:
        return table
    return CrossTable(table.specialize({"q'": "q", "k": "q/p"}).entries,
                      "superplane, q' = q, k = q/p")


def extend_to_differentials(table: CrossTable, plane: Presentation, group: Presentation) -> CrossTable:
    """Fill in rows for dx, d2x, ... from the coordinate rows."""
    entries = dict(table.entries)
    for g in plane.generators:
        if g.degree == 0:
            continue
        base = g.name[2:] if g.name.startswith("d2") else g.name[1:]
        for h in group.generators:
            if (g.name, h.name) in entries:
                continue
            src = entries.get((base, h.name))
            if src is None:
                continue
            entries[(g.name, h.name)] = -src if (g.degree * h.parity) % 2 else src
    return CrossTable(entries, table.label)


def _as_presentation(x) -> Presentation:
    return preset(x) if isinstance(x, str) else x


def _embed(e: Element, src: Presentation, dst: Presentation) -> Element:
    remap = {g.rank: dst.index[g.name] for g in src.generators}
    return Element({tuple(remap[g] for g in w): c for w, c in e.terms.items()})


def build_combined(plane, group, cross: CrossTable, name: str = "") -> Presentation:
    """Group entries, then plane generators, with cross-commutation rules.

    Raises :class:`CovarianceError` for a missing or zero cross entry.
    """
    plane, group = _as_presentation(plane), _as_presentation(group)
    gens = [Generator(g.name, i, g.degree, g.parity) for i, g in enumerate(group.generators)]
    off = len(gens)
    gens += [Generator(g.name, off + i, g.degree, g.parity) for i, g in enumerate(plane.generators)]
    combined_names = [g.name for g in gens]
    if len(set(combined_names)) != len(combined_names):
        raise CovarianceError("plane and group generator names collide")

    stub = _Stub(gens)
    rules = []
    for src in (group, plane):
        for lhs, rule in src.rules.items():
            rules.append(RewriteRule(
                tuple(stub.index[src.generators[g].name] for g in lhs),
                _embed(rule.rhs, src, stub),
                rule.note,
            ))
    for g in plane.generators:
        for h in group.generators:
            c = cross.entries.get((g.name, h.name))
            if c is None:
                raise CovarianceError(f"cross table has no entry for ({g.name}, {h.name})")
            if c.is_zero():
                raise CovarianceError(f"cross entry ({g.name}, {h.name}) is zero")
            gi, hi = stub.index[g.name], stub.index[h.name]
            rules.append(RewriteRule((gi, hi), Element.word((hi, gi), c), f"{g.name}*{h.name}"))
    relations = [
        Relation(r.label, _embed(r.lhs, src, stub), _embed(r.rhs, src, stub))
        for src in (group, plane)
        for r in src.relations
    ]
    free = [
        (src.generators[a].name, src.generators[b].name)
        for src in (group, plane)
        for a, b in src.free_pairs
    ]
    params = tuple(dict.fromkeys(group.params + plane.params))
    return Presentation(
        gens,
        rules,
        params,
        (f"{plane.name} with {group.name} coaction; cross table: {cross.label}",),
        name=name or f"{group.name}*{plane.name}",
        relations=relations,
        free_pairs=free,
    )


class _Stub:
    def __init__(self, gens):
        self.generators = gens
        self.index = {g.name: g.rank for g in gens}


@dataclass
class TransformationSpec:
    images: dict[str, Element]
    variant: str


def coaction(C: CalculusSpec, variant: str = "T") -> TransformationSpec:
    """Images of coordinates and their differentials under a coaction.

    Variants: ``T`` (x -> a x + b y), ``tT`` (transpose) for the plane;
    ``T`` and ``stT`` (supertranspose) for the superplane.  Differentials
    are mapped to d of the coordinate images, group entries being constants.
    """
    P = C.presentation
    w = lambda *names: Element.word(tuple(P.index[n] for n in names))
    if "theta" in P.index:
        beta, gamma = "beta", "gamma"
        if variant == "T":
            images = {"x": w("a", "x") + w(beta, "theta"), "theta": w(gamma, "x") + w("dgen", "theta")}
        elif variant == "stT":
            images = {"x": w("a", "x") - w(gamma, "theta"), "theta": w(beta, "x") + w("dgen", "theta")}
        else:
            raise CovarianceError(f"unknown superplane coaction {variant!r}")
        coords = ("x", "theta")
    else:
        if variant == "T":
            images = {"x": w("a", "x") + w("b", "y"), "y": w("c", "x") + w("dgen", "y")}
        elif variant == "tT":
            images = {"x": w("a", "x") + w("c", "y"), "y": w("b", "x") + w("dgen", "y")}
        else:
            raise CovarianceError(f"unknown plane coaction {variant!r}")
        coords = ("x", "y")
    for coord in coords:
        img = images[coord]
        name = coord
        for order in range(1, C.nilpotency):
            name = ("d" if order == 1 else "d2") + coord
            if name not in P.index:
                break
            img = d(img, C)
            images[name] = img
    return TransformationSpec(images, variant)


def transform(e: Element, P: Presentation, t: TransformationSpec) -> Element:
    """Substitute images letter by letter (free algebra, no rewriting)."""
    out = Element()
    for w, c in e.terms.items():
        acc = Element.scalar(c)
        for g in w:
            name = P.generators[g].name
            img = t.images.get(name)
            acc = acc.concat(img if img is not None else Element.word((g,)))
        out = out + acc
    return out


@dataclass
class CovarianceReport:
    variant: str
    residuals: list[tuple[str, Element]] = field(default_factory=list)

    @property
    def covariant(self) -> bool:
        return all(r.is_zero() for _, r in self.residuals)

    def nonzero(self) -> list[tuple[str, Element]]:
        return [(label, r) for label, r in self.residuals if not r.is_zero()]


def check_covariance(
    combined: Presentation,
    t: TransformationSpec,
    relations: Iterable[Relation | Element],
) -> CovarianceReport:
    """Reduce the transformed ``L - R`` of each relation in the combined algebra."""
    report = CovarianceReport(t.variant)
    for rel in relations:
        if isinstance(rel, Relation):
            label, e = rel.label, rel.difference()
        else:
            label, e = combined.format(rel), rel
        report.residuals.append((label, normalize(transform(e, combined, t), combined)))
    return report


# -- ready-made setups --------------------------------------------------------

_SETUPS = {
    "plane-pq-d2": ("gl-pq-2", "tT"),
    "plane-q-d2": ("gl-pq-2", "tT"),
    "plane-pq-d3": ("gl-pq-2", "tT"),
    "splane-q-d2": ("gl-q-11", "stT"),
    "splane-q-d3": ("gl-q-11", "stT"),
    "splane-pq-d2": ("gl-pq-11", "stT"),
    "splane-pq-d3": ("gl-pq-11", "stT"),
}


def default_cross_table(calculus_id: str) -> CrossTable:
    group_id, _ = _SETUPS[calculus_id]
    if group_id == "gl-pq-2":
        table = plane_cross_table()
        if calculus_id == "plane-q-d2":
            table = CrossTable(table.specialize({"p": "q"}).entries, table.label + ", p = q")
        return table
    return superplane_cross_table(two_parameter=(group_id == "gl-pq-11"))


def combined_calculus(calculus_id: str, cross: CrossTable | None = None) -> CalculusSpec:
    """Combined algebra of a calculus preset with its symmetry group.

    The group is taken at q' = q (and p = q for the one-parameter plane).
    """
    group_id, _ = _SETUPS[calculus_id]
    plane = preset(calculus_id)
    group = preset(group_id)
    group_bind = {"q'": "q"}
    if calculus_id == "plane-q-d2":
        group_bind["p"] = "q"
    group = specialize(group, group_bind, name=group.name)
    cross = cross or default_cross_table(calculus_id)
    cross = extend_to_differentials(cross, plane, group)
    P = build_combined(plane, group, cross)
    return calculus_for(P, definition(calculus_id).nilpotency, P.name)


def covariance_reports(calculus_id: str, cross: CrossTable | None = None) -> list[CovarianceReport]:
    """Reports under T and the (super)transpose for the preset's displayed relations.

    Relations of length > 2 (the cube rules) are not part of the covariant
    structure and are skipped.
    """
    C = combined_calculus(calculus_id, cross)
    P = C.presentation
    plane = preset(calculus_id)
    rels = [
        Relation(r.label, _embed(r.lhs, plane, P), _embed(r.rhs, plane, P))
        for r in plane.relations
        if max((len(w) for w in r.difference().terms), default=0) <= 2
    ]
    _, other = _SETUPS[calculus_id]
    return [check_covariance(P, coaction(C, v), rels) for v in ("T", other)]


# -- ansatz -------------------------------------------------------------------

_ANSATZ_LHS = (("x", "dx"), ("x", "dy"), ("y", "dx"), ("y", "dy"))
_ANSATZ_BASIS = (("dx", "x"), ("dy", "x"), ("dx", "y"), ("dy", "y"))


def ansatz_plane(coeffs: Sequence[Scalar] | None = None, extra_rules: Sequence[tuple[str, str, Element]] = ()) -> Presentation:
    """Plane with x*dx, x*dy, y*dx, y*dy written over dx*x, dy*x, dx*y, dy*y.

    ``coeffs`` default to the unknowns C1..C16.  2-form products stay free
    unless ``extra_rules`` supplies them.
    """
    gens = [Generator("dy", 0, 1), Generator("dx", 1, 1), Generator("x", 2, 0), Generator("y", 3, 0)]
    idx = {g.name: g.rank for g in gens}
    if coeffs is None:
        coeffs = [var(u) for u in ANSATZ_UNKNOWNS]
    rules = [RewriteRule((idx["y"], idx["x"]), Element.word((idx["x"], idx["y"]), parse_scalar("1/q")), "x*y = q*y*x")]
    relations = [Relation("x*y = q*y*x", Element.word((idx["x"], idx["y"])),
                          Element.word((idx["y"], idx["x"]), var("q")))]
    for i, (g1, g2) in enumerate(_ANSATZ_LHS):
        rhs = Element()
        for jdx, (b1, b2) in enumerate(_ANSATZ_BASIS):
            rhs = rhs + Element.word((idx[b1], idx[b2]), coeffs[4 * i + jdx])
        lhs = (idx[g1], idx[g2])
        rules.append(RewriteRule(lhs, rhs, f"{g1}*{g2} ansatz"))
        relations.append(Relation(f"{g1}*{g2} ansatz", Element.word(lhs), rhs))
    free = []
    have = set()
    for g1, g2, rhs in extra_rules:
        rules.append(RewriteRule((idx[g1], idx[g2]), rhs))
        have.add((g1, g2))
    if ("dx", "dy") not in have:
        free.append(("dx", "dy"))
    return Presentation(gens, rules, ("q", "p", "q'", "k"), ("first-order ansatz",),
                        name="plane-ansatz", relations=relations, free_pairs=free)


def _split_linear(s: Scalar) -> tuple[list[Scalar], Scalar]:
    """Coefficients of C1..C16 and the constant part of numerator(s)."""
    nparams = len(VARIABLES) - len(ANSATZ_UNKNOWNS)
    parts: list[dict] = [dict() for _ in range(len(ANSATZ_UNKNOWNS) + 1)]
    jparts: list[dict] = [dict() for _ in range(len(ANSATZ_UNKNOWNS) + 1)]
    for poly, target in ((s.a, parts), (s.b, jparts)):
        for exps, c in poly.terms():
            exps = tuple(int(x) for x in exps)
            unk = exps[nparams:]
            total = sum(unk)
            if total == 0:
                slot = len(ANSATZ_UNKNOWNS)
            elif total == 1:
                slot = unk.index(1)
            else:
                raise CovarianceError("ansatz equation is not linear in the unknowns")
            key = exps[:nparams] + (0,) * len(ANSATZ_UNKNOWNS)
            target[slot][key] = c
    out = [Scalar(_CTX.from_dict(parts[i]), _CTX.from_dict(jparts[i])) for i in range(len(parts))]
    return out[:-1], out[-1]


@dataclass
class LinearSystem:
    rows: list[list[Scalar]]  # coefficients of C1..C16
    rhs: list[Scalar]  # row . C = rhs
    labels: list[str]


def _equations(residual: Element, label: str, system: LinearSystem, P: Presentation):
    for w, c in residual:
        coeffs, const = _split_linear(c)
        if all(x.is_zero() for x in coeffs) and const.is_zero():
            continue
        system.rows.append(coeffs)
        system.rhs.append(-const)
        system.labels.append(f"{label}: coefficient of {P.word_str(w)}")


def ansatz_system(
    stages: str = "ab",
    cross: CrossTable | None = None,
    bindings: Mapping[str, object] | None = None,
) -> LinearSystem:
    """Linear equations on C1..C16.

    Stage ``a``: covariance of the four ansatz relations under T and tT.
    Stage ``b``: d(x*y - q*y*x) = 0.
    """
    system = LinearSystem([], [], [])
    plane = ansatz_plane()
    cross = cross or plane_cross_table(general=True)
    group = preset("gl-pq-2")
    if bindings:
        cross = cross.specialize(bindings)
        group = specialize(group, bindings, name=group.name)
    if "a" in stages:
        cross = extend_to_differentials(cross, plane, group)
        combined = build_combined(plane, group, cross, name="gl-pq-2*plane-ansatz")
        C = calculus_for(combined, 2)
        for variant in ("T", "tT"):
            t = coaction(C, variant)
            rels = [
                Relation(r.label, _embed(r.lhs, plane, combined), _embed(r.rhs, plane, combined))
                for r in plane.relations if "ansatz" in r.label
            ]
            for label, res in check_covariance(combined, t, rels).residuals:
                _equations(res, f"{variant} {label}", system, combined)
    if "b" in stages:
        C = calculus_for(plane, 2)
        rel = plane.relations[0].difference()
        res = normalize(d_free(rel, C), plane)
        _equations(res, "d(x*y - q*y*x)", system, plane)
    return system


def is_unit(s: Scalar) -> bool:
    """Nonzero constant times a monomial over any denominator.

    Such a pivot is invertible for every admissible (nonzero) parameter
    value, so eliminating with it imposes no condition on q, p, q', k.
    """
    if s.is_zero():
        return False
    monos = {tuple(int(x) for x in m) for m in s.a.monoms()}
    monos |= {tuple(int(x) for x in m) for m in s.b.monoms()}
    return len(monos) == 1


@dataclass
class Elimination:
    rank: int
    pivots: dict[int, int]  # column -> row
    rows: list[list[Scalar]]
    rhs: list[Scalar]
    leftover: list[int]  # rows without a pivot that are not identically 0 = 0

    def free(self, n: int) -> list[int]:
        return [c for c in range(n) if c not in self.pivots]

    def solution(self, n: int) -> dict[int, tuple[Scalar, dict[int, Scalar]]]:
        """column -> (constant, {free column: coefficient})."""
        free = self.free(n)
        return {
            col: (self.rhs[r], {f: -self.rows[r][f] for f in free if not self.rows[r][f].is_zero()})
            for col, r in self.pivots.items()
        }


def eliminate(rows: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar], unconditional: bool = True) -> Elimination:
    """Gauss-Jordan elimination with canonical zero tests.

    With ``unconditional`` only unit pivots (see :func:`is_unit`) are used;
    rows left without a pivot are conditions on the parameters.  Columns are
    visited in order, so pivot rows are zero on earlier free columns.
    """
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    n = len(rows[0]) if rows else 0
    ok = is_unit if unconditional else (lambda s: not s.is_zero())
    pivots: dict[int, int] = {}
    used: set[int] = set()
    progress = True
    while progress:
        progress = False
        for col in range(n):
            if col in pivots:
                continue
            candidates = [i for i in range(len(rows)) if i not in used and ok(rows[i][col])]
            if not candidates:
                continue
            r = min(candidates, key=lambda i: len(str(rows[i][col])))
            inv = rows[r][col].inverse()
            rows[r] = [x * inv for x in rows[r]]
            rhs[r] = rhs[r] * inv
            for i in range(len(rows)):
                f = rows[i][col]
                if i != r and not f.is_zero():
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
                    rhs[i] = rhs[i] - f * rhs[r]
            pivots[col] = r
            used.add(r)
            progress = True
    leftover = [
        i for i in range(len(rows))
        if i not in used and (any(not x.is_zero() for x in rows[i]) or not rhs[i].is_zero())
    ]
    return Elimination(len(pivots), pivots, rows, rhs, leftover)


class InconsistentSystemError(ArithmeticError):
    pass


@dataclass
class AnsatzSolution:
    rank: int
    free: list[str]
    solutions: list[dict[str, Scalar]]
    residual_constraints: list[list[Scalar]]  # per solution, raw numerators
    associativity: Scalar | None = None  # numerator polynomial in the free unknown
    equations: int = 0

    @property
    def unique(self) -> bool:
        return len(self.solutions) == 1 and not self.free

    def to_json(self) -> dict:
        fmt = lambda sol: {name: str(v) for name, v in sol.items()}
        return {
            "coefficients": fmt(self.solutions[0]) if len(self.solutions) == 1 else None,
            "solutions": [fmt(s) for s in self.solutions],
            "rank": self.rank,
            "free": list(self.free),
            "residual_constraints": sorted({str(c) for cs in self.residual_constraints for c in cs}),
            "associativity": None if self.associativity is None else str(self.associativity),
            "equations": self.equations,
        }


def _numerator(s: Scalar) -> Scalar:
    return Scalar(s.a, s.b)


def _two_form_rules(coeffs: Sequence[Scalar]) -> list[tuple[str, str, Element]]:
    """2-form rules obtained by differentiating the four first-order relations."""
    P = ansatz_plane(coeffs)
    C = calculus_for(P, 2)
    words = [P.word(*w) for w in (("dx", "dx"), ("dx", "dy"), ("dy", "dx"), ("dy", "dy"))]
    rows = []
    for rel in P.relations[1:]:
        e = normalize(d_free(rel.difference(), C), P)
        rows.append([e.coefficient(w) for w in words])
    el = eliminate(rows, [Scalar.coerce(0)] * len(rows), unconditional=False)
    rules = []
    for col, r in el.pivots.items():
        rhs = Element()
        for f in el.free(len(words)):
            c = el.rows[r][f]
            if not c.is_zero():
                rhs = rhs + Element.word(words[f], -c)
        rules.append((P.generators[words[col][0]].name, P.generators[words[col][1]].name, rhs))
    return rules


def associativity_defect(coeffs: Sequence[Scalar]) -> Element:
    """(x*dx)*dy - x*(dx*dy), both sides fully reduced."""
    P = ansatz_plane(coeffs, _two_form_rules(coeffs))
    w = P.word("x", "dx", "dy")
    left = normalize(P.rewrite_once(w, 0, P.word("x", "dx")), P)
    right = normalize(P.rewrite_once(w, 1, P.word("dx", "dy")), P)
    return left - right


def _univariate(poly, var_index: int) -> dict[int, object]:
    """Coefficients of ``poly`` as a polynomial in one variable."""
    out: dict[int, dict] = {}
    for m, c in poly.terms():
        m = tuple(int(x) for x in m)
        deg = m[var_index]
        rest = m[:var_index] + (0,) + m[var_index + 1:]
        out.setdefault(deg, {})[rest] = c
    return {deg: _CTX.from_dict(terms) for deg, terms in out.items()}


def _roots(poly, var_index: int) -> list[Scalar]:
    """Roots of a polynomial of degree <= 2 in one variable over the parameter field.

    Quadratics are solved only when the discriminant is a perfect square.
    """
    if poly.is_zero():
        raise InconsistentSystemError("associativity is satisfied identically; last unknown stays free")
    coeffs = _univariate(poly, var_index)
    deg = max(coeffs)
    c = [Scalar(coeffs.get(i, _CTX.from_dict({}))) for i in range(deg + 1)]
    if deg == 0:
        return []
    if deg == 1:
        return [-c[0] / c[1]]
    if deg == 2:
        disc = coeffs.get(1, _CTX.from_dict({})) ** 2 - 4 * coeffs[2] * coeffs.get(0, _CTX.from_dict({}))
        try:
            root = disc.sqrt()
        except Exception as exc:  # flint raises ValueError on non-squares
            raise InconsistentSystemError("associativity discriminant is not a perfect square") from exc
        two_a = c[2] * 2
        sols = [(-c[1] + Scalar(root)) / two_a, (-c[1] - Scalar(root)) / two_a]
        return sols if sols[0] != sols[1] else sols[:1]
    raise InconsistentSystemError(f"associativity equation has degree {deg} in the free unknown")


def solve_ansatz(
    stages: str = "abc",
    cross: CrossTable | None = None,
    bindings: Mapping[str, object] | None = None,
) -> AnsatzSolution:
    """Re-derive the first-order relations of the two-parameter plane.

    Stages: ``a`` covariance under T and tT, ``b`` d(x*y - q*y*x) = 0,
    ``c`` associativity of x*dx*dy.  Elimination uses unit pivots only, so
    rows that would need a non-unit pivot become residual constraints on the
    parameters.  Constraints are returned as raw numerators.
    """
    system = ansatz_system(stages.replace("c", ""), cross, bindings)
    n = len(ANSATZ_UNKNOWNS)
    el = eliminate(system.rows, system.rhs)
    free = el.free(n)
    family = el.solution(n)
    t_vars = {f: var(ANSATZ_UNKNOWNS[f]) for f in free}

    def coefficients(values: Mapping[int, Scalar]) -> list[Scalar]:
        out = []
        for col in range(n):
            if col in family:
                const, deps = family[col]
                v = const
                for f, c in deps.items():
                    v = v + c * values[f]
                out.append(v)
            else:
                out.append(values[col])
        return out

    def residuals(coeffs: Sequence[Scalar]) -> list[Scalar]:
        out = []
        for i in el.leftover:
            v = -el.rhs[i]
            for col in range(n):
                if not el.rows[i][col].is_zero():
                    v = v + el.rows[i][col] * coeffs[col]
            if not v.is_zero():
                out.append(_numerator(v))
        return out

    assoc = None
    if "c" in stages and len(free) == 1:
        (f,) = free
        coeffs = coefficients(t_vars)
        defect = associativity_defect(coeffs)
        g = None
        for _, c in defect:
            for part in (c.a, c.b):
                if not part.is_zero():
                    g = part if g is None else g.gcd(part)
        if g is None:
            raise InconsistentSystemError("associativity is satisfied identically; last unknown stays free")
        idx = len(VARIABLES) - n + f
        content = None
        for coeff in _univariate(g, idx).values():
            content = coeff if content is None else content.gcd(coeff)
        g = g / content
        assoc = Scalar(g)
        values = [{f: r} for r in _roots(g, idx)]
        free_names: list[str] = []
    else:
        values = [dict(t_vars)]
        free_names = [ANSATZ_UNKNOWNS[f] for f in free]

    solutions, constraints = [], []
    for vals in values:
        coeffs = coefficients(vals)
        solutions.append({name: c for name, c in zip(ANSATZ_UNKNOWNS, coeffs)})
        constraints.append(residuals(coeffs))
    return AnsatzSolution(el.rank, free_names, solutions, constraints, assoc, len(system.rows))


def expected_coefficients() -> dict[str, Scalar]:
    """The two-parameter d^2 plane relations, read off the shipped preset."""
    P = preset("plane-pq-d2")
    out = {}
    for i, lhs in enumerate(_ANSATZ_LHS):
        rule = P.rules.get(P.word(*lhs))
        for jdx, basis in enumerate(_ANSATZ_BASIS):
            c = rule.rhs.coefficient(P.word(*basis)) if rule else Scalar.coerce(0)
            out[ANSATZ_UNKNOWNS[4 * i + jdx]] = c
    return out
