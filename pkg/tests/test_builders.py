"""The example catalog: parameters, certificates and special members."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gencontact.builders import build_example, closed_two_forms, example_names
from gencontact.contact import (
    StructureError,
    geometric_type,
    integrability_check,
    normality_check,
    triple_from_pair,
)
from gencontact.models import builtin_model

ALL_NAMES = ["almost-contact", "cosymplectic", "deformation", "heisenberg",
             "hopf-family", "product", "s3-family", "triple-contact-7d"]


def test_catalog_is_complete_and_closed():
    assert example_names() == ALL_NAMES
    with pytest.raises(StructureError, match="available:"):
        build_example("zigzag")


def test_every_builder_returns_a_validated_bundle():
    for name in ALL_NAMES:
        structure = build_example(name)
        assert structure.name == name
        assert structure.pair.model is structure.model
        assert structure.triple.model is structure.model
        if name in ("deformation", "triple-contact-7d"):
            assert structure.mixed_pair is None
        else:
            assert structure.mixed_pair is not None
        assert name in repr(structure)


def test_float_parameters_are_rejected():
    with pytest.raises(StructureError, match="exact rational"):
        build_example("heisenberg", b=0.5)
    with pytest.raises(StructureError, match="exact rational"):
        build_example("s3-family", twisted=True, c=0.25)


# -- the sphere families ---------------------------------------------------


def test_holomorphic_input_splits_into_scalar_parts():
    s = build_example("s3-family", h="z*w")
    ctx = s.model.ctx
    assert s.extras["f"] == ctx.parse("x1*x3 - x2*x4")
    assert s.extras["g"] == ctx.parse("x1*x4 + x2*x3")
    cubic = build_example("s3-family", h="z*z*z")
    assert cubic.extras["f"] == ctx.parse("x1^3 - 3*x1*x2^2")
    assert cubic.extras["g"] == ctx.parse("3*x1^2*x2 - x2^3")


def test_scalar_pair_must_come_together():
    with pytest.raises(StructureError, match="both scalars or neither"):
        build_example("s3-family", f="x1")
    s = build_example("s3-family", f="x1", g="x2")
    assert s.extras["h"] is None
    assert str(s.extras["f"]) == "x1"


def test_symbolic_family_fixes_its_own_scalars():
    with pytest.raises(StructureError, match="fixes its own scalars"):
        build_example("s3-family", formal=True, h="z*w")
    s = build_example("s3-family", formal=True)
    assert s.model.name == "s3_formal"
    assert s.extras["f"] == s.model.ctx.gen("f")


def test_symbolic_certificates_are_the_structure_equations():
    # with both scalars left free, exactly one line obstructs and its
    # certificates are the two first-order combinations that must vanish
    s = build_example("s3-family", formal=True)
    fe, ge = s.extras["f"], s.extras["g"]
    verdict = integrability_check(s.pair, mode="strong")
    assert not verdict.ok
    by_name = {b.name: b for b in verdict.branches}
    assert by_name["e1"].ok
    assert by_name["e2"].failing_bracket == "[l1,l2]"
    assert by_name["e2"].certificates == [
        fe.derive("V3") + ge.derive("V2"),
        fe.derive("V2") - ge.derive("V3"),
    ]


def test_twisted_certificates_pick_up_quadratic_terms():
    # the volume twist shifts each obstruction by a quadratic expression
    # with the symbolic coefficient
    s = build_example("s3-family", formal=True, twisted=True)
    assert s.twist is not None
    fe, ge = s.extras["f"], s.extras["g"]
    c = s.model.ctx.gen("c")
    verdict = integrability_check(s.pair, mode="strong", twist=s.twist)
    by_name = {b.name: b for b in verdict.branches}
    assert by_name["e2"].certificates == [
        fe.derive("V3") + ge.derive("V2") - c * (ge * ge - fe * fe),
        fe.derive("V2") - ge.derive("V3") - 2 * c * fe * ge,
    ]


def test_concrete_twist_uses_the_given_coefficient():
    s = build_example("s3-family", h="z*w", twisted=True, c=Fraction(1, 2))
    assert str(s.twist.form) == "(1/2)*nu1^nu2^nu3"


def test_fiber_invariant_family_checks_invariance():
    hopf = build_example("hopf-family")
    assert hopf.model.name == "hopf_s3"
    assert hopf.extras["fiber_invariant"]
    with pytest.raises(StructureError, match="not invariant along the fiber"):
        build_example("hopf-family", formal=False, f="x1", g="x2")


def test_concrete_invariant_scalars_share_the_type_pattern():
    hopf = build_example("hopf-family", formal=False)
    assert [tuple(v) for v in geometric_type(hopf.pair)] == [
        (1, 2), (1, 2), (1, 2), (1, 2), (2, 1), (2, 1), (2, 1)]
    # the invariant quadratic pair does not satisfy the structure
    # equations, so the concrete subfamily member is not integrable
    assert not integrability_check(hopf.pair, mode="strong").ok


# -- the nilmanifold family ------------------------------------------------


@settings(max_examples=8, deadline=None)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=3),
       st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_nilmanifold_family_is_normal_at_every_parameter(b, c):
    heis = build_example("heisenberg", b=b, c=c)
    assert normality_check(heis.triple).is_normal


def test_nilmanifold_extras_record_the_parameters():
    heis = build_example("heisenberg", b=1, c=Fraction(1, 3))
    assert heis.extras["b"] == 1
    assert heis.extras["c"] == Fraction(1, 3)
    assert str(heis.extras["eta"]) == "al1"


def test_degenerate_cosymplectic_input_is_rejected():
    with pytest.raises(StructureError, match="degenerate"):
        build_example("cosymplectic", theta="al1^al2", eta="al1")


# -- graph deformations ----------------------------------------------------


def test_zero_deformation_returns_the_base_bundle():
    base = build_example("almost-contact")
    for epsilon in (None, 0):
        d = build_example("deformation", epsilon=epsilon)
        assert d.extras["base"] == "almost-contact"
        assert d.pair.equivalent_to(base.pair)


def test_nonzero_deformation_moves_the_bundle():
    base = build_example("almost-contact")
    d = build_example("deformation",
                      epsilon=[[0, Fraction(1, 4)], [Fraction(-1, 4), 0]])
    assert not d.pair.equivalent_to(base.pair)
    assert d.pair.e1 == base.pair.e1


def test_deformation_parameter_validation():
    with pytest.raises(StructureError, match="must be zero"):
        build_example("deformation", epsilon=Fraction(1, 2))
    with pytest.raises(StructureError, match="2 x 2"):
        build_example("deformation", epsilon=[[0, 1]])
    with pytest.raises(StructureError, match="skew"):
        build_example("deformation", epsilon=[[0, 1], [1, 0]])
    with pytest.raises(StructureError, match="need a base name"):
        build_example("deformation", base=build_example("product"), b=1)


def test_deformation_accepts_a_prebuilt_base():
    base = build_example("heisenberg", b=1)
    d = build_example("deformation", base=base)
    assert d.model is base.model
    assert d.pair.equivalent_to(base.pair)


# -- the 7-dimensional family ---------------------------------------------


def test_seven_family_has_four_distinct_members():
    members = ("phi0", "sigma", "tau", "sigma-tau")
    triples = {m: build_example("triple-contact-7d", member=m).triple
               for m in members}
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            assert triples[a].phi != triples[b].phi
    # the frame is shared by the whole family
    first = triples["phi0"]
    for m in members[1:]:
        assert triples[m].e1 == first.e1
        assert triples[m].e2 == first.e2


def test_seven_family_member_spelling_is_forgiving():
    spelled = build_example("triple-contact-7d", member="sigma_tau")
    assert spelled.extras["member"] == "sigma-tau"
    with pytest.raises(StructureError, match="member must be one of"):
        build_example("triple-contact-7d", member="rho")


def test_seven_family_builds_deterministically():
    a = build_example("triple-contact-7d")
    b = build_example("triple-contact-7d")
    assert a.triple.phi == b.triple.phi
    assert a.extras["family"] == ("phi0", "sigma", "tau", "sigma-tau")


# -- closed 2-form catalog -------------------------------------------------


def test_closed_two_forms_are_closed_and_pinned():
    torus = builtin_model("torus3")
    assert [str(w) for w in closed_two_forms(torus)] == [
        "al1^al2", "al1^al3", "al2^al3"]
    sphere = builtin_model("s3")
    assert [str(w) for w in closed_two_forms(sphere)] == [
        "nu1^nu2", "nu1^nu3", "nu2^nu3"]
    seven = builtin_model("triple7")
    for w in closed_two_forms(seven):
        assert w.exterior_d().is_zero()


def test_closed_two_forms_fall_back_to_a_search():
    from gencontact.tduality import builtin_pair, dualize_structure
    setup, carried = builtin_pair("heisenberg", b=1)
    dual = dualize_structure(setup, carried)
    found = closed_two_forms(dual.model)
    assert len(found) == 3
    for w in found:
        assert w.exterior_d().is_zero()
