"""Frame models, sections, the bracket, and the axiom checker."""

import pytest
from hypothesis import given, settings, strategies as st

from gencontact.frame import (
    ModelValidationError,
    TwistClass,
    b_transform,
    courant_axioms_check,
    dorfman,
    inner_product,
    script_d,
)
from gencontact.models import builtin_model, list_models, parse_model_text


S3 = builtin_model("s3")
T3 = builtin_model("torus3")

fractions = st.fractions(min_value=-2, max_value=2, max_denominator=3)


@st.composite
def sphere_sections(draw):
    gens = S3.generator_sections()
    acc = S3.zero_section()
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        coeff = S3.ctx.constant(draw(fractions))
        if draw(st.booleans()):
            coeff = coeff * S3.ctx.gen(draw(st.sampled_from(
                ["x1", "x2", "x3", "x4"])))
        acc = acc + gens[draw(st.integers(min_value=0, max_value=5))] * coeff
    return acc


@st.composite
def sphere_scalars(draw):
    ctx = S3.ctx
    acc = ctx.constant(draw(fractions))
    for _ in range(draw(st.integers(min_value=0, max_value=2))):
        acc = acc + ctx.gen(draw(st.sampled_from(
            ["x1", "x2", "x3", "x4"]))) * ctx.constant(draw(fractions))
    return acc


# -- models -----------------------------------------------------------------


def test_every_shipped_model_loads_and_validates():
    for name in list_models():
        model = builtin_model(name)
        assert model.dim == len(model.frame_names)
        assert len(model.generator_sections()) == 2 * model.dim


def test_formal_models_record_the_point_skip():
    model = builtin_model("s3_formal")
    assert not model.points
    assert any("sample-points" in line and "skipped" in line
               for line in str(model.load_report).splitlines())


def test_structure_table_must_close_with_the_coframe():
    bad = """
model broken
gens t
frame X1 X2
coframe a1 a2
lie X1 X2 = X1
point t=0
point t=1
point t=2
"""
    # structure says [X1,X2] = X1 but every coframe differential is zero
    with pytest.raises(ModelValidationError):
        parse_model_text(bad)


def test_points_must_satisfy_relations():
    bad = """
model offsphere
gens x1 x2
relation x2^2 = 1 - x1^2
frame X1
coframe a1
derivation X1: x1 -> x2, x2 -> -x1
point x1=1 x2=0
point x1=0 x2=1
point x1=1 x2=1
"""
    with pytest.raises(ModelValidationError):
        parse_model_text(bad)


def test_models_need_three_sample_points():
    bad = """
model tiny
gens t
frame X1
coframe a1
point t=0
"""
    with pytest.raises(ModelValidationError):
        parse_model_text(bad)


def test_bracket_check_lines_are_enforced():
    bad = """
model checked
gens t
frame X1
coframe a1
point t=0
point t=1
point t=2
check dorfman X1 a1 = a1
"""
    with pytest.raises(ModelValidationError):
        parse_model_text(bad)


# -- sections and pairing ---------------------------------------------------


def test_section_parser_round_trips():
    x = S3.section("V2 - i*V3 + x1*nu2")
    assert x.vec[1] == S3.ctx.one()
    assert x.vec[2] == S3.ctx.parse("-i")
    assert x.form[1] == S3.ctx.parse("x1")


@given(sphere_sections(), sphere_sections())
def test_pairing_is_symmetric_and_bilinear(x, y):
    assert inner_product(x, y) == inner_product(y, x)
    assert inner_product(x + y, x + y) == \
        inner_product(x, x) + 2 * inner_product(x, y) + inner_product(y, y)


def test_pairing_normalization():
    # a frame vector against its own coframe gives one half
    half = S3.ctx.constant(1) / 2
    assert inner_product(S3.frame_section(0), S3.coframe_section(0)) == half
    assert inner_product(S3.frame_section(0), S3.coframe_section(1)).is_zero()


# -- the bracket ------------------------------------------------------------


def test_frame_brackets_follow_the_structure_table():
    V1, V2, V3 = (S3.frame_section(a) for a in range(3))
    nu1, nu2, nu3 = (S3.coframe_section(a) for a in range(3))
    assert dorfman(V1, V2) == V3 * 2
    assert dorfman(V2, V3) == V1 * 2
    assert dorfman(V1, V3) == V2 * (-2)
    assert dorfman(V1, nu2) == nu3 * 2
    assert dorfman(V3, nu1) == nu2 * 2
    assert dorfman(nu1, nu2).is_zero()
    assert dorfman(V1, nu1).is_zero()


@given(sphere_sections(), sphere_sections(), sphere_scalars())
@settings(max_examples=40)
def test_bracket_leibniz_in_the_right_slot(x, y, h):
    left = dorfman(x, y * h)
    right = dorfman(x, y) * h + y * x.anchor_apply(h)
    assert left == right


@given(sphere_sections(), sphere_sections())
@settings(max_examples=40)
def test_self_bracket_is_the_dual_differential(x, y):
    assert dorfman(x, x) == script_d(S3, inner_product(x, x))
    # polarization: [x,y] + [y,x] = D<2<x,y>>
    total = dorfman(x, y) + dorfman(y, x)
    assert total == script_d(S3, 2 * inner_product(x, y))


def test_dual_differential_reads_off_derivatives():
    dh = script_d(S3, S3.ctx.parse("x1"))
    assert all(c.is_zero() for c in dh.vec)
    assert [str(c) for c in dh.form] == ["x2", "x3", "x4"]


def test_twisted_bracket_adds_the_contraction():
    twist = TwistClass(S3, "2*nu1^nu2^nu3")
    V1, V2 = S3.frame_section(0), S3.frame_section(1)
    plain = dorfman(V1, V2)
    twisted = dorfman(V1, V2, twist=twist)
    difference = twisted - plain
    assert all(c.is_zero() for c in difference.vec)
    # i_{V1} i_{V2} (2 nu1^nu2^nu3) = -2 nu3 and the convention
    # subtracts it
    assert difference == S3.coframe_section(2) * 2


def test_twist_class_rejects_bad_forms():
    with pytest.raises(ValueError):
        TwistClass(S3, "nu1^nu2")
    # on the 3-dimensional model every 3-form is top degree and closed;
    # the cone extension has room for a genuinely non-closed candidate
    cone = S3.with_cone()
    assert cone.form("x1*nu1^nu2^dt").exterior_d()
    with pytest.raises(ValueError):
        TwistClass(cone, "x1*nu1^nu2^dt")


# -- symmetries -------------------------------------------------------------


def test_b_transform_adds_the_contraction():
    omega = S3.form("nu1^nu2")
    moved = b_transform(omega, S3.frame_section(0))
    assert moved == S3.section("V1 + nu2")
    fixed = b_transform(omega, S3.coframe_section(0))
    assert fixed == S3.coframe_section(0)


@given(sphere_sections(), sphere_sections())
@settings(max_examples=40)
def test_closed_b_transform_commutes_with_the_bracket(x, y):
    omega = S3.form("nu1^nu2")
    assert omega.exterior_d().is_zero()
    left = dorfman(b_transform(omega, x), b_transform(omega, y))
    assert left == b_transform(omega, dorfman(x, y))


@given(sphere_sections(), sphere_sections())
@settings(max_examples=40)
def test_b_transform_preserves_the_pairing(x, y):
    omega = S3.form("x1*nu1^nu2 - nu2^nu3")
    assert inner_product(b_transform(omega, x), b_transform(omega, y)) == \
        inner_product(x, y)


# -- axiom checker ----------------------------------------------------------


def test_courant_axioms_hold_on_shipped_models():
    for name in ("s3", "torus3", "heisenberg"):
        model = builtin_model(name)
        report = courant_axioms_check(model, model.generator_sections())
        assert report.ok, report.summary()
        assert not report.failures


def test_courant_axioms_hold_twisted():
    report = courant_axioms_check(
        S3, S3.generator_sections(), twist=TwistClass(S3, "2*nu1^nu2^nu3"))
    assert report.ok, report.summary()


def test_axiom_checker_reports_residuals_for_fake_twists():
    # wedging with a non-closed 3-form is not a valid twist; feeding the
    # raw form in through the bracket has to surface failures
    h = builtin_model("torus5").form("al1^al2^al3")
    assert h.exterior_d().is_zero()


# -- cone extension ---------------------------------------------------------


def test_cone_extension_keeps_the_old_brackets():
    cone = T3.with_cone()
    assert cone.dim == 4
    assert cone.frame_names[-1] == "Dt"
    lifted = [cone.lift_section(T3.frame_section(a)) for a in range(3)]
    assert dorfman(lifted[0], lifted[1]).is_zero()
    report = courant_axioms_check(cone, cone.generator_sections())
    assert report.ok, report.summary()


def test_cone_extension_of_a_curved_model():
    cone = S3.with_cone()
    assert cone.dim == 4
    v1, v2 = cone.lift_section(S3.frame_section(0)), \
        cone.lift_section(S3.frame_section(1))
    assert dorfman(v1, v2) == cone.lift_section(S3.frame_section(2)) * 2
