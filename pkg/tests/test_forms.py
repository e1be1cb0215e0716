"""Graded form algebra, the differential, and pointwise spinor data."""

import pytest
from hypothesis import given, strategies as st

from gencontact.forms import (
    DifferentialForm,
    ZeroSpinorAtPoint,
    clifford_kernel_at,
    is_pure_at,
)
from gencontact.models import builtin_model
from gencontact.ring import QQi


T3 = builtin_model("torus3")
T5 = builtin_model("torus5")
S3 = builtin_model("s3")

fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def indices(dim):
    out = [()]
    for a in range(dim):
        out.append((a,))
        for b in range(a + 1, dim):
            out.append((a, b))
            for c in range(b + 1, dim):
                out.append((a, b, c))
    return out


T3_INDICES = indices(3)


@st.composite
def torus_forms(draw, homogeneous=None):
    picks = draw(st.lists(st.sampled_from(T3_INDICES), min_size=0,
                          max_size=4, unique=True))
    if homogeneous is not None:
        picks = [idx for idx in picks if len(idx) == homogeneous]
    terms = {}
    for idx in picks:
        value = draw(fractions)
        if value:
            terms[idx] = T3.ctx.constant(value)
    return DifferentialForm(T3, terms)


@st.composite
def sphere_forms(draw):
    terms = {}
    for idx in draw(st.lists(st.sampled_from(T3_INDICES), min_size=1,
                             max_size=3, unique=True)):
        coeff = S3.ctx.constant(draw(fractions))
        for _ in range(draw(st.integers(min_value=0, max_value=2))):
            coeff = coeff * S3.ctx.gen(draw(st.sampled_from(
                ["x1", "x2", "x3", "x4"])))
        if coeff:
            terms[idx] = coeff
    return DifferentialForm(S3, terms)


# -- wedge algebra ----------------------------------------------------------


@given(torus_forms(), torus_forms(), torus_forms())
def test_wedge_is_associative_and_bilinear(a, b, c):
    assert a.wedge(b.wedge(c)) == a.wedge(b).wedge(c)
    assert (a + b).wedge(c) == a.wedge(c) + b.wedge(c)


@given(st.integers(min_value=0, max_value=2),
       st.integers(min_value=0, max_value=2),
       st.data())
def test_wedge_graded_commutativity(p, q, data):
    a = data.draw(torus_forms(homogeneous=p))
    b = data.draw(torus_forms(homogeneous=q))
    flip = a.wedge(b)
    if (p * q) % 2 == 1:
        assert b.wedge(a) == -flip
    else:
        assert b.wedge(a) == flip


def test_degree_bookkeeping():
    one = T3.ctx.one()
    mixed = DifferentialForm(T3, {(): one, (0, 1): one, (2,): one})
    assert sorted(mixed.degrees()) == [0, 1, 2]
    assert not mixed.has_definite_parity()
    assert mixed.degree_part(1) == DifferentialForm(T3, {(2,): one})
    even = DifferentialForm(T3, {(): one, (0, 1): one})
    assert even.has_definite_parity() and even.parity() == 0


# -- contraction and the Clifford relation ----------------------------------


@given(torus_forms(), st.lists(fractions, min_size=3, max_size=3))
def test_interior_squares_to_zero(form, vec):
    coeffs = [T3.ctx.constant(v) for v in vec]
    assert form.interior(coeffs).interior(coeffs).is_zero()


@given(torus_forms(), st.lists(fractions, min_size=3, max_size=3),
       st.lists(fractions, min_size=3, max_size=3))
def test_clifford_square_is_the_self_pairing(form, vec, cov):
    vcs = [T3.ctx.constant(v) for v in vec]
    fcs = [T3.ctx.constant(v) for v in cov]
    twice = form.clifford(vcs, fcs).clifford(vcs, fcs)
    scale = T3.ctx.zero()
    for v, f in zip(vcs, fcs):
        scale = scale + v * f
    assert twice == form * scale


# -- differential -----------------------------------------------------------


@given(sphere_forms())
def test_d_squared_vanishes_on_the_sphere(form):
    assert form.exterior_d().exterior_d().is_zero()


@given(sphere_forms(), sphere_forms())
def test_d_satisfies_the_graded_leibniz_rule(a, b):
    if not a.has_definite_parity():
        return
    left = a.wedge(b).exterior_d()
    right = a.exterior_d().wedge(b)
    if a.parity() == 0:
        right = right + a.wedge(b.exterior_d())
    else:
        right = right - a.wedge(b.exterior_d())
    assert left == right


def test_twisted_differential_adds_the_wedge():
    h = S3.form("2*nu1^nu2^nu3")
    form = S3.form("x1*nu1")
    assert form.exterior_d(twist=h) == form.exterior_d() + h.wedge(form)


def test_coframe_differentials_match_the_model_table():
    for a in range(S3.dim):
        assert DifferentialForm.coframe(S3, a).exterior_d() == S3.d_coframe(a)


# -- transpose and the Mukai pairing ----------------------------------------


def test_transpose_reverses_index_order():
    one = T3.ctx.one()
    assert DifferentialForm(T3, {(0, 1): one}).transpose() == \
        DifferentialForm(T3, {(0, 1): -one})
    assert DifferentialForm(T3, {(0, 1, 2): one}).transpose() == \
        DifferentialForm(T3, {(0, 1, 2): -one})
    assert DifferentialForm(T3, {(0,): one}).transpose() == \
        DifferentialForm(T3, {(0,): one})


def test_mukai_pinned_values():
    one = T3.ctx.one()
    al1 = DifferentialForm.coframe(T3, 0)
    al23 = DifferentialForm(T3, {(1, 2): one})
    vol = DifferentialForm(T3, {(0, 1, 2): one})
    assert al1.mukai(al23) == -vol
    assert al23.mukai(al1) == vol


def test_mukai_detects_the_standard_mixed_pair():
    i = T3.ctx.constant(QQi(0, 1))
    one = T3.ctx.one()
    rho1 = DifferentialForm.from_scalar(T3, one) \
        + DifferentialForm(T3, {(0, 1): i})
    rho2 = DifferentialForm(T3, {(2,): one, (0, 1, 2): i})
    vol = DifferentialForm(T3, {(0, 1, 2): T3.ctx.constant(QQi(0, 2))})
    assert rho1.mukai(rho2.conj()) == vol


# -- pointwise spinor geometry ----------------------------------------------


def test_type_at_is_the_lowest_surviving_degree():
    ctx = S3.ctx
    form = DifferentialForm(S3, {(): ctx.parse("x1"), (0, 1): ctx.one()})
    on_equator = {"x1": 0, "x2": 0, "x3": 1, "x4": 0}
    at_pole = {"x1": 1, "x2": 0, "x3": 0, "x4": 0}
    assert form.type_at(on_equator) == 2
    assert form.type_at(at_pole) == 0
    with pytest.raises(ZeroSpinorAtPoint):
        DifferentialForm.zero(S3).type_at(at_pole)


def test_purity_at_points():
    one = T3.ctx.one()
    i = T3.ctx.constant(QQi(0, 1))
    point = T3.points[0]
    exp_area = DifferentialForm.from_scalar(T3, one) \
        + DifferentialForm(T3, {(0, 1): i})
    line = DifferentialForm(T3, {(2,): one, (0, 1, 2): i})
    assert is_pure_at(exp_area, point)
    assert is_pure_at(line, point)
    assert len(clifford_kernel_at(exp_area, point)) == 3
    # adding the volume to the unit breaks the isotropy of the kernel
    broken = DifferentialForm.from_scalar(T3, one) \
        + DifferentialForm(T3, {(0, 1, 2): one})
    assert not is_pure_at(broken, point)
    five = DifferentialForm.from_scalar(T5, T5.ctx.one()) \
        + DifferentialForm(T5, {(0, 1, 2, 3): T5.ctx.one()})
    assert not is_pure_at(five, T5.points[0])
