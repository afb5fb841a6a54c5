"""Command-line front end: ``ncdiff normalize --algebra plane-pq-d2 "y*x"``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .algebra import (
    Presentation,
    PresentationError,
    critical_pairs,
    element_to_json,
    normalize,
    presentation_to_json,
)
from .covariance import (
    CovarianceError,
    InconsistentSystemError,
    combined_calculus,
    covariance_reports,
    solve_ansatz,
)
from .differential import (
    calculus,
    check_leibniz,
    check_nilpotency,
    check_relations_closed,
    Report,
    d,
)
from .parsing import parse_expr
from .presets import (
    CALCULUS_IDS,
    PRESET_IDS,
    SpecializationError,
    UnknownPresetError,
    definition,
    export_presets,
    preset,
    rule_differences,
    specialize,
)
from .scalar import ScalarError
from .syntax import ParseError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = ("relations", "dclosed", "nilpotency", "leibniz", "confluence", "covariance")


class UsageError(Exception):
    pass


def parse_bindings(text: str | None) -> dict[str, str]:
    """``"p=q,k=q/p"`` -> ``{"p": "q", "k": "q/p"}``."""
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or not name or not value or "=" in value:
            raise UsageError(f"bad binding {item!r}; expected var=expr")
        out[name] = value
    return out


def _presentation(args) -> Presentation:
    P = preset(args.algebra)
    bindings = parse_bindings(args.subst)
    return specialize(P, bindings) if bindings else P


def _calculus(args):
    if not definition(args.algebra).nilpotency:
        raise UsageError(f"{args.algebra} is a group preset, not a calculus")
    return calculus(args.algebra, parse_bindings(args.subst) or None)


def _emit(args, text: str, data) -> None:
    print(json.dumps(data, indent=2) if args.json else text)


def cmd_normalize(args) -> int:
    P = _presentation(args)
    e = normalize(parse_expr(args.expr, P), P)
    _emit(args, P.format(e), element_to_json(e, P))
    return EXIT_OK


def cmd_diff(args) -> int:
    if args.times < 1:
        raise UsageError("--times must be >= 1")
    C = _calculus(args)
    P = C.presentation
    e = d(normalize(parse_expr(args.expr, P), P), C, args.times)
    _emit(args, P.format(e), element_to_json(e, P))
    return EXIT_OK


def _report_text(name: str, r: Report, P) -> str:
    lines = [f"{r.status}: {name} ({r.checked} checked)"]
    lines += [f"  {line}" for line in r.details]
    if r.witness is not None:
        lines.append(f"  witness: {P.format(r.witness)}")
    return "\n".join(lines)


def cmd_check(args) -> int:
    what = args.what
    if what == "covariance":
        if args.subst:
            raise UsageError("covariance uses the fixed cross tables; --subst is not supported")
        if args.algebra not in CALCULUS_IDS:
            raise UsageError(f"{args.algebra} is not a calculus preset")
        reports = covariance_reports(args.algebra)
        ok = all(r.covariant for r in reports)
        lines = []
        data = {"status": "pass" if ok else "fail", "variants": {}}
        P = combined_calculus(args.algebra).presentation
        for r in reports:
            bad = r.nonzero()
            lines.append(f"{r.variant}: {len(r.residuals) - len(bad)}/{len(r.residuals)} residuals zero")
            lines += [f"  {label}: {P.format(res)}" for label, res in bad]
            data["variants"][r.variant] = [
                {"relation": label, "residual": element_to_json(res, P)} for label, res in r.residuals
            ]
        _emit(args, f"{data['status']}: covariance\n" + "\n".join(lines), data)
        return EXIT_OK if ok else EXIT_FAIL

    if what == "confluence":
        P = _presentation(args)
        obs = critical_pairs(P)
        text = [f"{len(obs)} obstructions"]
        text += [f"  {P.word_str(o.overlap)}: {P.format(o.difference)}" for o in obs]
        data = {
            "status": "pass" if not obs else "fail",
            "obstructions": [
                {"overlap": [P.generators[g].name for g in o.overlap],
                 "difference": element_to_json(o.difference, P)}
                for o in obs
            ],
        }
        _emit(args, "\n".join(text), data)
        return EXIT_OK if not obs else EXIT_FAIL

    if what == "relations":
        P = _presentation(args)
        r = Report("pass")
        for rel in P.relations:
            r.checked += 1
            res = normalize(rel.difference(), P)
            if not res.is_zero():
                r.status = "fail"
                r.details.append(f"{rel.label}: {P.format(res)}")
        _emit(args, _report_text("relation closure", r, P), r.to_json(P))
        return EXIT_OK if r.passed else EXIT_FAIL

    C = _calculus(args)
    P = C.presentation
    if what == "dclosed":
        r = check_relations_closed(C)
    elif what == "nilpotency":
        r = check_nilpotency(C, max_len=args.max_len, samples=args.samples)
    else:
        r = check_leibniz(C, samples=args.samples)
    _emit(args, _report_text(what, r, P), r.to_json(P))
    return EXIT_OK if r.passed else EXIT_FAIL


def cmd_solve(args) -> int:
    bindings = parse_bindings(args.subst) or None
    sol = solve_ansatz(args.stages, bindings=bindings)
    data = sol.to_json()
    lines = [f"rank {sol.rank} of 16"]
    if sol.free:
        lines.append("free: " + ", ".join(sol.free))
    if sol.associativity is not None:
        lines.append(f"associativity: {sol.associativity} = 0")
    for i, s in enumerate(sol.solutions, 1):
        lines.append(f"solution {i}:")
        lines += [f"  {name} = {v}" for name, v in s.items()]
    if data["residual_constraints"]:
        lines.append("residual constraints (must vanish):")
        lines += [f"  {c}" for c in data["residual_constraints"]]
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.export:
        paths = export_presets(args.export)
        print("\n".join(str(p) for p in paths))
        return EXIT_OK
    if args.id:
        P = preset(args.id)
        if args.json:
            print(json.dumps(presentation_to_json(P), indent=2))
        else:
            print(P.name)
            for rule in P.rules.values():
                lhs = P.word_str(rule.lhs)
                print(f"  {lhs} -> {P.format(rule.rhs)}")
        return EXIT_OK
    for pid in PRESET_IDS:
        print(f"{pid}: {definition(pid).note}")
    return EXIT_OK


def cmd_limit(args) -> int:
    if not args.subst:
        raise UsageError("limit needs --subst")
    P = _presentation(args)
    if args.compare:
        diffs = rule_differences(P, preset(args.compare))
        text = "identical" if not diffs else "\n".join(diffs)
        _emit(args, text, {"status": "pass" if not diffs else "fail", "differences": diffs})
        return EXIT_OK if not diffs else EXIT_FAIL
    if args.json:
        print(json.dumps(presentation_to_json(P), indent=2))
    else:
        for rule in P.rules.values():
            print(f"{P.word_str(rule.lhs)} -> {P.format(rule.rhs)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncdiff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, algebra_required=True):
        p.add_argument("--algebra", required=algebra_required, metavar="PRESET")
        p.add_argument("--subst", metavar="BINDINGS", help='e.g. "p=q" or "p=j^2*q^-1"')
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("normalize", help="reduce an expression to normal form")
    common(p)
    p.add_argument("expr")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("diff", help="apply the exterior differential")
    common(p)
    p.add_argument("expr")
    p.add_argument("--times", type=int, default=1)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("check", help="run a consistency check")
    common(p)
    p.add_argument("what", choices=CHECKS)
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="re-derive the plane relations from the 16-coefficient ansatz")
    p.add_argument("--stages", default="abc", choices=("ab", "abc"))
    p.add_argument("--subst", metavar="BINDINGS")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("presets", help="list, show or export presets")
    p.add_argument("id", nargs="?")
    p.add_argument("--export", metavar="DIR")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("limit", help="specialize a preset, optionally comparing with another")
    common(p)
    p.add_argument("--compare", metavar="PRESET")
    p.set_defaults(func=cmd_limit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, PresentationError, UnknownPresetError, SpecializationError,
            ScalarError, CovarianceError, InconsistentSystemError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
