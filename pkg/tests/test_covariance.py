import pytest

from ncdiff.algebra import Relation
from ncdiff.covariance import (
    CovarianceError,
    CrossTable,
    associativity_defect,
    build_combined,
    coaction,
    combined_calculus,
    covariance_reports,
    default_cross_table,
    eliminate,
    expected_coefficients,
    extend_to_differentials,
    is_unit,
    plane_cross_table,
    solve_ansatz,
    superplane_cross_table,
)
from ncdiff.differential import calculus_for
from ncdiff.parsing import parse_expr
from ncdiff.presets import CALCULUS_IDS, preset, specialize
from ncdiff.scalar import ANSATZ_UNKNOWNS, Scalar, parse_scalar, substitute

REDUCE = {"q'": "q", "k": "q/p"}


def reduced_group():
    return specialize(preset("gl-pq-2"), {"q'": "q"})


def test_build_combined_shape():
    plane = preset("plane-pq-d2")
    cross = extend_to_differentials(plane_cross_table(), plane, reduced_group())
    P = build_combined(plane, reduced_group(), cross)
    assert [g.name for g in P.generators] == ["a", "b", "c", "dgen", "dy", "dx", "x", "y"]
    P2 = build_combined("splane-pq-d2", "gl-pq-11", extend_to_differentials(
        superplane_cross_table(), preset("splane-pq-d2"), preset("gl-pq-11")))
    assert len(P2.generators) == 8


def test_missing_or_zero_cross_entry():
    plane, group = preset("plane-pq-d2"), reduced_group()
    cross = extend_to_differentials(plane_cross_table(), plane, group)
    entries = dict(cross.entries)
    del entries[("dy", "c")]
    with pytest.raises(CovarianceError, match=r"\(dy, c\)"):
        build_combined(plane, group, CrossTable(entries))
    with pytest.raises(CovarianceError):
        build_combined(plane, group, cross.with_entry("x", "a", 0))


def test_reduced_table_is_general_table_specialized():
    general = plane_cross_table(general=True).specialize(REDUCE)
    assert general.entries == plane_cross_table().entries
    s = superplane_cross_table(general=True).specialize(REDUCE)
    assert s.entries == superplane_cross_table().entries


def test_differential_rows_follow_parity():
    t = extend_to_differentials(superplane_cross_table(False), preset("splane-q-d2"), preset("gl-q-11"))
    # dtheta commutes with every entry, dx anticommutes with beta and gamma
    assert all(t.entries[("dtheta", h)] == 1 for h in ("a", "beta", "gamma", "dgen"))
    assert t.entries[("dx", "beta")] == -1 and t.entries[("dx", "a")] == 1


def test_plane_relation_under_T():
    C = combined_calculus("plane-pq-d2")
    P = C.presentation
    t = coaction(C, "T")
    from ncdiff.covariance import check_covariance

    rep = check_covariance(P, t, [parse_expr("x*y - q*y*x", P)])
    assert rep.covariant
    rep = check_covariance(P, t, [parse_expr("x*dx - 1/(p*q)*dx*x", P)])
    assert rep.covariant
    rep = check_covariance(P, t, [parse_expr("x*dx - 1/q*dx*x", P)])
    assert not rep.covariant


def test_general_table_covariant_for_generic_group():
    plane = preset("plane-pq-d2")
    group = preset("gl-pq-2")
    cross = extend_to_differentials(plane_cross_table(general=True), plane, group)
    P = build_combined(plane, group, cross)
    C = calculus_for(P, 2)
    from ncdiff.covariance import check_covariance

    for v in ("T", "tT"):
        assert check_covariance(P, coaction(C, v), [parse_expr("x*y - q*y*x", P)]).covariant


@pytest.mark.parametrize("pid", CALCULUS_IDS)
def test_presets_are_covariant(pid):
    reports = covariance_reports(pid)
    assert len(reports) == 2
    for r in reports:
        assert r.covariant, [(label, str(e)) for label, e in r.nonzero()]


@pytest.mark.parametrize("pid", ["plane-pq-d2", "splane-pq-d2", "splane-q-d3"])
def test_every_single_corruption_is_detected(pid):
    base = default_cross_table(pid)
    for key in base.entries:
        bad = base.with_entry(*key, parse_scalar("2*q^5") * base.entries[key])
        assert not all(r.covariant for r in covariance_reports(pid, bad)), key


def test_coaction_variants():
    C = combined_calculus("splane-q-d2")
    P = C.presentation
    st = coaction(C, "stT")
    assert P.format(st.images["x"]) == "a*x - gamma*theta"
    # odd entries pick up a sign when d passes them
    assert P.format(coaction(C, "T").images["dx"]) == "a*dx - beta*dtheta"
    with pytest.raises(CovarianceError):
        coaction(C, "tT")


def test_is_unit():
    assert is_unit(parse_scalar("-3*q^2/(1+p)"))
    assert is_unit(parse_scalar("(1+j)*q"))
    assert not is_unit(parse_scalar("q - p"))
    assert not is_unit(Scalar.coerce(0))


def test_eliminate_small_system():
    one, zero = Scalar.coerce(1), Scalar.coerce(0)
    q = parse_scalar("q")
    el = eliminate([[one, q], [q, q * q]], [one, q])
    assert el.rank == 1 and el.free(2) == [1] and not el.leftover
    el = eliminate([[one, zero], [parse_scalar("q-p"), zero]], [one, one])
    # q - p is not a unit: the second row is left as a condition
    assert el.rank == 1 and el.leftover == [1]


def test_ansatz_rank_before_associativity():
    for bindings in (None, REDUCE):
        sol = solve_ansatz("ab", bindings=bindings)
        assert sol.rank == 15
        assert len(sol.free) == 1


def test_ansatz_solution_reproduces_plane_calculus():
    sol = solve_ansatz()
    expected = expected_coefficients()
    reduced = [{k: substitute(v, REDUCE) for k, v in s.items()} for s in sol.solutions]
    assert expected in reduced
    for constraints in sol.residual_constraints:
        for c in constraints:
            assert substitute(substitute(c, {"k": "q'/p"}), {"q'": "q"}).is_zero()
    assert sol.residual_constraints[0]
    data = sol.to_json()
    assert data["rank"] == 15 and set(data) >= {"coefficients", "rank", "residual_constraints"}


def test_second_associativity_root_is_a_genuine_calculus():
    """The quadratic associativity condition has a second root; it also
    gives a confluent, d-closed and covariant calculus."""
    from ncdiff.algebra import critical_pairs
    from ncdiff.covariance import _two_form_rules, ansatz_plane, _embed, check_covariance
    from ncdiff.differential import check_relations_closed

    sol = solve_ansatz(bindings=REDUCE)
    assert len(sol.solutions) == 2
    other = [s for s in sol.solutions if s != expected_coefficients()]
    assert len(other) == 1
    coeffs = [other[0][u] for u in ANSATZ_UNKNOWNS]
    assert associativity_defect(coeffs).is_zero()
    P = ansatz_plane(coeffs, _two_form_rules(coeffs))
    assert not critical_pairs(P)
    assert check_relations_closed(calculus_for(P, 2)).passed
    group = reduced_group()
    PC = build_combined(P, group, extend_to_differentials(plane_cross_table(), P, group))
    rels = [Relation(r.label, _embed(r.lhs, P, PC), _embed(r.rhs, P, PC)) for r in P.relations]
    CC = calculus_for(PC, 2)
    assert all(check_covariance(PC, coaction(CC, v), rels).covariant for v in ("T", "tT"))
