"""Exact scalar arithmetic: Gaussian rationals, quotient contexts,
declared derivations."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gencontact.ring import (
    QQi,
    ParseError,
    ScalarContext,
    SecondOrderDerivativeRequired,
    fraction_sqrt,
    tokenize,
)
from gencontact.models import builtin_model


S3 = builtin_model("s3")
HOPF = builtin_model("hopf_s3")


fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=5)
gaussians = st.builds(QQi, fractions, fractions)


@st.composite
def sphere_elements(draw):
    """Small random polynomials in the sphere coordinates."""
    ctx = S3.ctx
    acc = ctx.constant(draw(fractions))
    for _ in range(draw(st.integers(min_value=1, max_value=3))):
        term = ctx.constant(draw(fractions))
        for _ in range(draw(st.integers(min_value=0, max_value=2))):
            term = term * ctx.gen(draw(st.sampled_from(
                ["x1", "x2", "x3", "x4"])))
        acc = acc + term
    return acc


# -- Gaussian rationals -----------------------------------------------------


@given(gaussians, gaussians, gaussians)
def test_gaussian_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(gaussians, gaussians)
def test_gaussian_conjugation_is_multiplicative(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()


@given(gaussians)
def test_gaussian_norm_clears_the_imaginary_part(a):
    norm = a * a.conj()
    assert norm.im == 0
    assert norm.re >= 0


@given(gaussians)
def test_gaussian_division_inverts_multiplication(a):
    if not a:
        return
    quotient = QQi(1) / a
    assert a * quotient == QQi(1)


def test_gaussian_powers_and_strings():
    i = QQi(0, 1)
    assert i ** 2 == QQi(-1)
    assert i ** 3 == QQi(0, -1)
    assert str(QQi(Fraction(1, 2), Fraction(-3, 2))) == "(1/2-3/2*i)"
    with pytest.raises(ZeroDivisionError):
        QQi(1) / QQi(0)


def test_fraction_sqrt_exact_cases():
    assert fraction_sqrt(Fraction(25, 16)) == Fraction(5, 4)
    assert fraction_sqrt(Fraction(0)) == 0
    assert fraction_sqrt(Fraction(2)) is None
    assert fraction_sqrt(Fraction(-1)) is None


# -- parsing ----------------------------------------------------------------


def test_tokenizer_understands_both_power_spellings():
    assert tokenize("x1**2") == ["x1", "^", "2"]
    assert tokenize("x1^2") == ["x1", "^", "2"]
    with pytest.raises(ParseError):
        tokenize("x1 @ x2")


def test_parse_round_trips_through_str():
    ctx = S3.ctx
    for text in ("x1^2 - 1/2*x2*x3", "i*x4 + 3", "2*x1*x2*x3*x4"):
        element = ctx.parse(text)
        assert ctx.parse(str(element)) == element


def test_parse_rejects_unknown_names():
    with pytest.raises(ParseError):
        S3.ctx.parse("x9 + 1")


# -- quotient contexts ------------------------------------------------------


@given(sphere_elements(), sphere_elements(), sphere_elements())
def test_sphere_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_radius_relation_normalizes_away():
    ctx = S3.ctx
    assert ctx.parse("x1^2 + x2^2 + x3^2 + x4^2") == ctx.one()
    assert ctx.parse("x4^2") == ctx.parse("1 - x1^2 - x2^2 - x3^2")
    # higher powers fall through the same rewrite
    assert ctx.parse("x4^3") == ctx.parse("x4 - x1^2*x4 - x2^2*x4 - x3^2*x4")


def test_reduction_is_ring_compatible():
    ctx = S3.ctx
    a = ctx.parse("x4^2 + x1")
    b = ctx.parse("x4 - x2")
    direct = ctx.parse("(x4^2 + x1) * (x4 - x2)")
    assert a * b == direct


@given(sphere_elements(), sphere_elements())
def test_derivations_satisfy_leibniz(a, b):
    for direction in ("V1", "V2", "V3"):
        left = (a * b).derive(direction)
        right = a.derive(direction) * b + a * b.derive(direction)
        assert left == right


def test_derivations_preserve_the_relation():
    ctx = S3.ctx
    # both sides of the defining relation must move identically
    for direction in ("V1", "V2", "V3"):
        lhs = ctx.parse("x4^2").derive(direction)
        rhs = ctx.parse("1 - x1^2 - x2^2 - x3^2").derive(direction)
        assert lhs == rhs


def test_evaluation_at_sample_points():
    ctx = S3.ctx
    radius = ctx.parse("x1^2 + x2^2 + x3^2 + x4^2")
    mixed = ctx.parse("x1*x3 - x2*x4")
    for point in S3.points:
        assert radius.evaluate_number(point) == QQi(1)
    assert mixed.evaluate_number(S3.points[5]) == QQi(Fraction(12, 25))


def test_points_must_assign_exactly_the_free_generators():
    with pytest.raises(ValueError):
        S3.ctx.check_point({"x1": Fraction(1), "x2": Fraction(0)})
    with pytest.raises(ValueError):
        S3.ctx.check_point({"x1": Fraction(1), "x2": Fraction(0),
                            "x3": Fraction(0), "x4": Fraction(0),
                            "x5": Fraction(0)})


# -- formal generators ------------------------------------------------------


def test_declared_derivatives_chain():
    ctx = HOPF.ctx
    f = ctx.gen("f")
    assert f.derive("V2") == ctx.gen("f2")
    assert f.derive("V1").is_zero()
    # the rotation action on first derivatives is declared
    assert ctx.gen("f2").derive("V1") == ctx.parse("2*f3")


def test_missing_second_derivative_raises():
    ctx = HOPF.ctx
    with pytest.raises(SecondOrderDerivativeRequired):
        ctx.gen("f2").derive("V2")


def test_formal_generators_have_no_relations():
    ctx = HOPF.ctx
    square = ctx.parse("f^2")
    assert square.degree() == 2
    assert square != ctx.one()


def test_map_into_transports_polynomials():
    source = ScalarContext(("z", "w"))
    target = S3.ctx
    images = {"z": target.parse("x1 + i*x2"), "w": target.parse("x3 + i*x4")}
    moved = source.parse("z*w").map_into(target, images)
    assert moved == target.parse("x1*x3 - x2*x4 + i*(x1*x4 + x2*x3)")
