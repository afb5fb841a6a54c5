import random

import pytest

from ncdiff.algebra import (
    LEFTMOST,
    RIGHTMOST,
    Element,
    Generator,
    Presentation,
    PresentationError,
    RewriteRule,
    critical_pairs,
    element_from_json,
    element_to_json,
    load_presentation,
    normalize,
    presentation_to_json,
)
from ncdiff.differential import random_word
from ncdiff.parsing import parse_expr, parse_relation
from ncdiff.presets import PRESET_IDS, is_confluent, preset
from ncdiff.scalar import parse_scalar
from ncdiff.syntax import ParseError


def nf(text, pid="plane-pq-d2"):
    P = preset(pid)
    return P.format(normalize(parse_expr(text, P), P))


def test_basic_normal_forms():
    assert nf("y*x") == "(1/q)*x*y"
    assert nf("x*y") == "x*y"
    assert nf("x*y - q*y*x") == "0"
    assert nf("y*x*dx") == "((-q*p + 1)/(q^2*p^2))*dy*x*x + (1/(q^3*p))*dx*x*y"
    assert nf("theta*theta", "splane-q-d2") == "0"


def test_parse_examples():
    P = preset("plane-pq-d3")
    e = parse_expr("x*dx", P)
    assert e == Element.word(P.word("x", "dx"))
    e = parse_expr("(j^2*q*p-1)/(1+q*p)*dx*y", P)
    assert len(e) == 1 and e.coefficient(P.word("dx", "y")) == parse_scalar("(j^2*q*p-1)/(1+q*p)")
    with pytest.raises(ParseError):
        parse_expr("x*w", P)
    with pytest.raises(ParseError):
        parse_expr("x/dx", P)
    with pytest.raises(ParseError):
        parse_expr("x^-1", P)
    with pytest.raises(ParseError) as info:
        parse_expr("x * * y", P)
    assert info.value.pos is not None


def test_products_keep_written_order():
    P = preset("plane-pq-d2")
    assert parse_expr("y*x", P) != parse_expr("x*y", P)
    assert parse_expr("(x+y)^2", P) == parse_expr("x*x + x*y + y*x + y*y", P)


def test_relation_chain():
    P = preset("plane-pq-d2")
    rels = parse_relation("dx^2 = dy^2 = 0", P)
    assert len(rels) == 2
    assert all(r.rhs.is_zero() for r in rels)


@pytest.mark.parametrize("pid", PRESET_IDS)
def test_print_parse_round_trip(pid):
    P = preset(pid)
    rng = random.Random(3)
    for _ in range(30):
        e = Element()
        for _ in range(3):
            e = e + Element.word(random_word(P, rng, 0, 4), parse_scalar(rng.choice(["1", "-1", "q", "j^2*q-1", "1/(1+q*p)", "-3/2"])))
        e = normalize(e, P)
        assert parse_expr(P.format(e), P) == e


@pytest.mark.parametrize("pid", PRESET_IDS)
def test_strategies_agree_on_confluent_presets(pid):
    P = preset(pid)
    if not is_confluent(P):
        pytest.skip("strategy agreement is only promised for confluent presets")
    rng = random.Random(5)
    for _ in range(50):
        e = Element()
        for _ in range(2):
            e = e + Element.word(random_word(P, rng, 1, 5), parse_scalar(rng.choice(["1", "q", "j-p"])))
        assert normalize(e, P, LEFTMOST) == normalize(e, P, RIGHTMOST)


def test_validation_errors():
    gens = [Generator("x", 0), Generator("y", 1)]
    with pytest.raises(PresentationError):
        Presentation([Generator("x", 1)], [])
    with pytest.raises(PresentationError):  # rhs not smaller
        Presentation(gens, [RewriteRule((0, 1), Element.word((1, 0)))])
    with pytest.raises(PresentationError):  # unknown rank
        Presentation(gens, [RewriteRule((1, 5), Element())])
    with pytest.raises(PresentationError):  # missing rule for y*x
        Presentation(gens, [])
    Presentation(gens, [], free_pairs=[("y", "x")])


def test_critical_pairs_detects_overlap():
    # x*x -> y, y*x -> x*y is a small non-confluent system
    gens = [Generator("x", 0), Generator("y", 1)]
    P = Presentation(gens, [RewriteRule((0, 0), Element.word((1,))),
                            RewriteRule((1, 0), Element.word((0, 1), parse_scalar("q")))])
    obs = critical_pairs(P)
    assert obs and all(not o.difference.is_zero() for o in obs)
    assert not critical_pairs(preset("plane-pq-d2"))


def test_json_round_trip():
    for pid in PRESET_IDS:
        P = preset(pid)
        Q = load_presentation(presentation_to_json(P))
        assert presentation_to_json(Q) == presentation_to_json(P)
    P = preset("splane-pq-d3")
    e = parse_expr("(j^2*q*p-1)/(1+q*p)*dx*theta - d2theta", P)
    assert element_from_json(element_to_json(e, P), P) == e


def test_load_rejects_unknown_generator():
    data = presentation_to_json(preset("plane-pq-d2"))
    data["rules"][0]["lhs"] = ["x", "w"]
    with pytest.raises(PresentationError):
        load_presentation(data)
