"""Pairs, triples, normality, reduction and the cone construction."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gencontact.builders import build_example
from gencontact.contact import (
    ContactPair,
    MixedPair,
    StructureError,
    cone_lift,
    cone_spinor,
    cone_to_sekiya,
    cone_type_bounds,
    geometric_type,
    in_span,
    integrability_check,
    is_poon_wade,
    mixed_pair_integrability,
    normal_frame_criterion,
    normality_check,
    pair_from_triple,
    phi_blocks,
    poon_wade_reduce,
    sekiya_from_triple,
    sekiya_to_cone,
    triple_from_pair,
    triple_from_sekiya,
    type_sum_check,
)
from gencontact.models import builtin_model
from gencontact.ring import QQi
from gencontact.tduality import builtin_pair, dualize_structure


def _torus_sections():
    model = builtin_model("torus3")
    i = model.ctx.constant(QQi(0, 1))
    X = model.frame_section
    A = model.coframe_section
    return model, i, X, A


# -- pair validation -------------------------------------------------------


def test_pair_accepts_a_hand_built_frame():
    model, i, X, A = _torus_sections()
    pair = ContactPair(model, (X(2), A(2)), [X(0) - i * X(1), A(0) - i * A(1)])
    assert [tuple(v) for v in geometric_type(pair)] == [(1, 2)] * 3


def test_pair_rejects_short_l_frame():
    model, i, X, A = _torus_sections()
    with pytest.raises(StructureError, match="L needs 2 generators"):
        ContactPair(model, (X(2), A(2)), [X(0) - i * X(1)])


def test_pair_rejects_degenerate_e_pairing():
    model, i, X, A = _torus_sections()
    with pytest.raises(StructureError, match="split signature"):
        ContactPair(model, (A(2), A(2)), [X(0) - i * X(1), A(0) - i * A(1)])


def test_pair_rejects_l_meeting_its_conjugate():
    model, i, X, A = _torus_sections()
    with pytest.raises(StructureError, match="conjugate"):
        ContactPair(model, (X(2), A(2)), [X(0), A(1)])


def test_pair_rejects_l_not_orthogonal_to_e():
    model, i, X, A = _torus_sections()
    # the second generator pairs with e2 through its X3 component
    bad = X(2) + A(0) - i * A(1)
    with pytest.raises(StructureError, match="not orthogonal"):
        ContactPair(model, (X(2), A(2)), [X(0) - i * X(1), bad])


def test_pair_rejects_non_isotropic_l():
    model, i, X, A = _torus_sections()
    with pytest.raises(StructureError, match="not isotropic"):
        ContactPair(model, (X(2), A(2)), [X(0) - i * A(0), X(1) + i * A(1)])


def test_geometric_type_needs_odd_dimension():
    structure = build_example("product")
    cone = structure.model.with_cone()
    lifted_e = [cone.lift_section(x) for x in structure.pair.e_sections()]
    lifted_l = [cone.lift_section(l) for l in structure.pair.l_sections]
    # the lifted spans stay isotropic but the ambient dimension is even
    pair = ContactPair(cone, lifted_e, lifted_l + [cone.frame_section(5)],
                       validate=False)
    with pytest.raises(StructureError, match="odd-dimensional"):
        geometric_type(pair)


# -- geometric type --------------------------------------------------------


def test_types_on_the_round_sphere_family():
    s = build_example("s3-family", h="z*w")
    assert [tuple(v) for v in geometric_type(s.pair)] == [
        (1, 2), (1, 2), (1, 2), (1, 2), (2, 1), (2, 1), (2, 1)]


def test_types_on_the_nilmanifold_and_flat_torus():
    heis = build_example("heisenberg", b=1)
    flat = build_example("cosymplectic")
    assert [tuple(v) for v in geometric_type(heis.pair)] == [(1, 1)] * 3
    assert [tuple(v) for v in geometric_type(flat.pair)] == [(1, 1)] * 3


# -- triples and the frame choice ------------------------------------------


def test_triple_round_trip_reproduces_the_pair():
    s = build_example("s3-family", h="z*w")
    back = pair_from_triple(triple_from_pair(s.pair))
    assert back.e1 == s.pair.e1
    assert back.e2 == s.pair.e2
    assert back.equivalent_to(s.pair)


@settings(max_examples=12, deadline=None)
@given(st.fractions(min_value=Fraction(1, 3), max_value=4, max_denominator=4))
def test_endomorphism_ignores_frame_rescaling(scale):
    heis = build_example("heisenberg", b=1)
    base = triple_from_pair(heis.pair)
    other = triple_from_pair(heis.pair, frame=[[scale, 0], [0, 1 / scale]])
    assert other.phi == base.phi
    assert other.e1 == heis.pair.e1 * heis.model.ctx.constant(scale)


def test_endomorphism_ignores_frame_swap():
    heis = build_example("heisenberg", b=1)
    base = triple_from_pair(heis.pair)
    other = triple_from_pair(heis.pair, frame=[[0, 1], [1, 0]])
    assert other.phi == base.phi
    assert other.e1 == heis.pair.e2
    assert other.e2 == heis.pair.e1


def test_block_decomposition_is_consistent():
    # phi_blocks re-derives the forms-to-forms block and checks skewness,
    # so a clean return is already the assertion; pin one entry on top.
    flat = build_example("cosymplectic")
    blocks = phi_blocks(triple_from_pair(flat.pair))
    m = flat.model.dim
    assert len(blocks.a) == m and len(blocks.b) == m and len(blocks.c) == m
    assert not any(any(row) for row in blocks.a)
    assert str(blocks.b[0][1]) == "-1"
    assert str(blocks.c[0][1]) == "-1"


# -- integrability and normality -------------------------------------------


def test_transverse_pair_is_integrable_but_not_strongly():
    tr = build_example("cosymplectic", model="heisenberg",
                       theta="al1^al2", eta="al3")
    strong = integrability_check(tr.pair, mode="strong")
    weak = integrability_check(tr.pair, mode="integrable")
    assert not strong.ok and weak.ok
    by_name = {b.name: b for b in strong.branches}
    assert by_name["e1"].ok
    assert not by_name["e2"].ok
    assert by_name["e2"].failing_bracket == "[l1,l2]"
    assert [str(c) for c in by_name["e2"].certificates] == ["-1"]


def test_integrability_rejects_unknown_modes():
    heis = build_example("heisenberg", b=1)
    with pytest.raises(ValueError, match="unknown integrability mode"):
        integrability_check(heis.pair, mode="weak")


def test_sphere_family_is_strongly_integrable():
    for h in ("0", "z*w", "z*z", "z*z*z"):
        s = build_example("s3-family", h=h)
        assert integrability_check(s.pair, mode="strong").ok


def test_normality_splits_the_sphere_family():
    quadratic = build_example("s3-family", h="z*z")
    cubic = build_example("s3-family", h="z*z*z")
    assert normality_check(triple_from_pair(quadratic.pair)).is_normal
    verdict = normality_check(triple_from_pair(cubic.pair))
    assert not verdict.is_normal
    assert "not normal" in verdict.summary()


def test_cubic_obstruction_is_the_frame_conditions():
    # torsion passes; only the frame compatibilities and the frame
    # bracket obstruct, and the bracket residuals are the two scalars
    # built from the radial derivative of the defining functions.
    cubic = build_example("s3-family", h="z*z*z")
    verdict = normality_check(triple_from_pair(cubic.pair))
    labels = [label for label, _ in verdict.failures]
    assert labels == ["frame-compat(x3,e1)", "frame-compat(x4,e1)",
                      "frame-compat(x3,e2)", "frame-compat(x4,e2)",
                      "frame-bracket"]
    ctx = cubic.model.ctx
    f = ctx.parse("x1^3 - 3*x1*x2^2")
    g = ctx.parse("3*x1^2*x2 - x2^3")
    residuals = dict(verdict.failures)["frame-bracket"]
    assert residuals == [f.derive("V1") - 2 * g, g.derive("V1") + 2 * f]


def test_transverse_pair_fails_normality_with_torsion():
    tr = build_example("cosymplectic", model="heisenberg",
                       theta="al1^al2", eta="al3")
    verdict = normality_check(triple_from_pair(tr.pair))
    assert not verdict.is_normal
    assert any(label.startswith("torsion") for label, _ in verdict.failures)


def test_scalar_potential_search_has_three_outcomes():
    smooth = build_example("s3-family", h="z*w")
    held = normal_frame_criterion(smooth.pair)
    assert held.status == "holds" and held.conclusive
    assert str(held.witness) == "0"

    cubic = build_example("s3-family", h="z*z*z")
    refuted = normal_frame_criterion(cubic.pair)
    assert refuted.status == "fails"
    assert str(refuted.certificate) == \
        "x2^6 + 3*x1^2*x2^4 + 3*x1^4*x2^2 + x1^6"
    assert "no 1-form reproduces the frame bracket" in refuted.reason

    tr = build_example("cosymplectic", model="heisenberg",
                       theta="al1^al2", eta="al3")
    gated = normal_frame_criterion(tr.pair)
    assert gated.status == "fails"
    assert "integrab" in gated.reason


def test_potential_search_agrees_with_the_direct_check():
    cases = [
        build_example("s3-family", h="z*w"),
        build_example("s3-family", h="z*z*z"),
        build_example("cosymplectic"),
        build_example("cosymplectic", model="heisenberg",
                      theta="al1^al2", eta="al3"),
    ]
    for structure in cases:
        criterion = normal_frame_criterion(structure.pair)
        direct = normality_check(triple_from_pair(structure.pair))
        if criterion.conclusive:
            assert (criterion.status == "holds") == direct.is_normal


# -- special frames and reduction ------------------------------------------


def test_special_frame_recognizer_on_the_nilmanifold():
    heis = build_example("heisenberg", b=1)
    verdict = is_poon_wade(heis.pair)
    assert verdict
    assert str(verdict.vector_witness) == "X1 + X3"
    assert str(verdict.form_witness) == "al1"


def test_special_frame_recognizer_on_mixed_frames():
    s = build_example("s3-family", h="z*w")
    assert not is_poon_wade(s.pair)
    flat = build_example("cosymplectic")
    assert is_poon_wade(flat.pair)


def test_gauge_reduction_straightens_the_dual_frame():
    setup, carried = builtin_pair("heisenberg", b=1)
    dual = dualize_structure(setup, carried)
    assert not is_poon_wade(dual.pair)
    result = poon_wade_reduce(dual.pair)
    assert str(result.omega) == "al1^alt3"
    assert str(result.pair.e1) == "X1"
    assert not any(result.pair.e1.form)
    assert result.notes == ()
    assert result.pair.model is dual.pair.model


# -- quadruples and the cone -----------------------------------------------


def test_quadruple_round_trip_at_every_scale():
    heis = build_example("heisenberg", b=1)
    triple = triple_from_pair(heis.pair)
    for lam in (0, Fraction(3, 4), 2):
        quad = sekiya_from_triple(triple, lam=lam)
        back = triple_from_sekiya(quad)
        assert back.phi == triple.phi
        assert back.e1 == triple.e1
        assert back.e2 == triple.e2


def test_cone_round_trip_preserves_the_quadruple():
    flat = build_example("cosymplectic")
    triple = triple_from_pair(flat.pair)
    quad = sekiya_from_triple(triple, lam=Fraction(3, 4))
    j = sekiya_to_cone(quad)
    back = cone_to_sekiya(j)
    assert back.lam == quad.lam
    assert back.phi == quad.phi
    assert back.e1 == quad.e1
    assert back.e2 == quad.e2


def test_cone_scale_must_stay_rational():
    flat = build_example("cosymplectic")
    quad = sekiya_from_triple(triple_from_pair(flat.pair), lam=1)
    with pytest.raises(ValueError, match="perfect rational square"):
        sekiya_to_cone(quad)


def test_cone_lift_squares_to_minus_one():
    heis = build_example("heisenberg", b=1)
    j = cone_lift(triple_from_pair(heis.pair))
    cone = j.model
    for k in range(cone.dim):
        x = cone.frame_section(k)
        assert j.apply(j.apply(x)) == -x
        y = cone.coframe_section(k)
        assert j.apply(j.apply(y)) == -y


def test_cone_type_rows_follow_the_anchor_rule():
    s = build_example("s3-family", h="z*w")
    assert cone_type_bounds(s.pair) == [
        (2, 2, True), (2, 2, True), (2, 2, True), (2, 2, True),
        (1, 0, False), (1, 0, False), (1, 0, False)]
    heis = build_example("heisenberg", b=1)
    assert cone_type_bounds(heis.pair) == [(1, 1, True)] * 3


# -- spinor pairs ----------------------------------------------------------


def test_mixed_pair_needs_opposite_parity():
    heis = build_example("heisenberg", b=1)
    mp = heis.mixed_pair
    with pytest.raises(StructureError, match="opposite parity"):
        MixedPair(heis.model, mp.rho1, mp.rho1, mp.e1, mp.e2)


def test_mixed_pair_checks_the_exchange_identities():
    heis = build_example("heisenberg", b=1)
    mp = heis.mixed_pair
    two = heis.model.ctx.constant(2)
    with pytest.raises(StructureError, match="exchange identity"):
        MixedPair(heis.model, mp.rho1, mp.rho2 * two, mp.e1, mp.e2)


def test_mixed_pair_integrability_finds_derivative_witnesses():
    # each witness must reproduce the exterior derivative by Clifford
    # action; on the nilmanifold both spinor forms are closed.
    heis = build_example("heisenberg", b=1)
    verdict = mixed_pair_integrability(heis.mixed_pair)
    assert verdict.ok
    assert [str(r.witness) for r in verdict.reports] == ["0", "0"]

    mp = build_example("s3-family", h="z*w").mixed_pair
    verdict = mixed_pair_integrability(mp)
    assert verdict.ok and all(r.solvable for r in verdict.reports)
    w1, w2 = (r.witness for r in verdict.reports)
    assert str(w1) == "2*i*nu1"
    assert mp.rho1.exterior_d() == w1.clifford(mp.rho1)
    assert mp.rho2.exterior_d() == w2.clifford(mp.rho2)


def test_type_balance_rows():
    heis = build_example("heisenberg", b=1)
    flat = build_example("cosymplectic")
    assert type_sum_check(heis.mixed_pair, heis.pair) == [(1, 0, 1)] * 3
    assert type_sum_check(flat.mixed_pair, flat.pair) == [(1, 0, 1)] * 3


def test_cone_spinor_is_pure_and_annihilated_by_lifts():
    heis = build_example("heisenberg", b=1)
    rho = cone_spinor(heis.mixed_pair)
    assert str(rho) == \
        "(1) + (i)*al1^al2 + (-i)*al1^dt + (i)*al2^al3 + al1^al2^al3^dt"
    cone = heis.model.with_cone()
    for l in heis.pair.l_sections:
        assert not cone.lift_section(l).clifford(rho)
