"""Fraction-free solving: exactness, certificates, pivot discipline."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gencontact.linear import NoSolution, matrix_rank, nullspace, solve_linear
from gencontact.models import builtin_model
from gencontact.ring import ScalarContext


CTX = ScalarContext(("u",))
S3 = builtin_model("s3")

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def constant_matrix(rows, cols):
    return st.lists(
        st.lists(fractions, min_size=cols, max_size=cols),
        min_size=rows, max_size=rows)


def to_elements(grid):
    return [[CTX.constant(entry) for entry in row] for row in grid]


@given(constant_matrix(3, 3), st.lists(fractions, min_size=3, max_size=3))
def test_solutions_satisfy_their_system(grid, vector):
    matrix = to_elements(grid)
    x0 = [CTX.constant(v) for v in vector]
    rhs = []
    for row in matrix:
        acc = CTX.zero()
        for entry, value in zip(row, x0):
            acc = acc + entry * value
        rhs.append(acc)
    solution = solve_linear(CTX, matrix, rhs).as_elements()
    for row, b in zip(matrix, rhs):
        acc = CTX.zero()
        for entry, value in zip(row, solution):
            acc = acc + entry * value
        assert acc == b


@given(constant_matrix(3, 2), st.lists(fractions, min_size=3, max_size=3))
def test_refutation_certificates_verify(grid, vector):
    matrix = to_elements(grid)
    rhs = [CTX.constant(v) for v in vector]
    try:
        solution = solve_linear(CTX, matrix, rhs)
    except NoSolution as failure:
        assert failure.certificate
        # the multipliers really combine the rows to 0 = certificate
        for j in range(2):
            acc = CTX.zero()
            for mult, row in zip(failure.multipliers, matrix):
                acc = acc + mult * row[j]
            assert acc.is_zero()
        combined = CTX.zero()
        for mult, b in zip(failure.multipliers, rhs):
            combined = combined + mult * b
        assert combined == failure.certificate
    else:
        for row, b in zip(matrix, rhs):
            acc = CTX.zero()
            for entry, value in zip(row, solution.as_elements()):
                acc = acc + entry * value
            assert acc == b


@given(constant_matrix(2, 4))
def test_nullspace_vectors_annihilate(grid):
    matrix = to_elements(grid)
    basis = nullspace(CTX, matrix)
    assert len(basis) == 4 - matrix_rank(CTX, matrix)
    for vec in basis:
        assert any(vec)
        for row in matrix:
            acc = CTX.zero()
            for entry, value in zip(row, vec):
                acc = acc + entry * value
            assert acc.is_zero()


def test_rank_of_pinned_matrices():
    ident = to_elements([[1, 0], [0, 1]])
    assert matrix_rank(CTX, ident) == 2
    dependent = to_elements([[1, 2], [2, 4]])
    assert matrix_rank(CTX, dependent) == 1
    zero = to_elements([[0, 0], [0, 0]])
    assert matrix_rank(CTX, zero) == 0


def test_shape_errors():
    with pytest.raises(ValueError):
        solve_linear(CTX, [], [])
    with pytest.raises(ValueError):
        solve_linear(CTX, to_elements([[1, 2], [3]]), [CTX.zero()] * 2)
    with pytest.raises(ValueError):
        solve_linear(CTX, to_elements([[1]]), [])


def test_constant_pivots_are_preferred():
    # with the polynomial row first, a naive first-nonzero pivot would
    # accumulate x1 into the denominator; preferring the constant row
    # keeps the denominator constant so as_elements succeeds
    ctx = S3.ctx
    matrix = [[ctx.parse("x1"), ctx.one()], [ctx.one(), ctx.zero()]]
    rhs = [ctx.parse("x1 + 5"), ctx.one()]
    solution = solve_linear(ctx, matrix, rhs)
    assert solution.denominator.is_constant()
    assert solution.as_elements() == [ctx.one(), ctx.constant(5)]


def test_zero_solutions_skip_the_denominator():
    # the unique solution is zero; a polynomial denominator must not
    # block reading it off
    ctx = S3.ctx
    solution = solve_linear(ctx, [[ctx.parse("x1")]], [ctx.zero()])
    assert not solution.denominator.is_constant()
    assert solution.as_elements() == [ctx.zero()]


def test_polynomial_division_failures_are_loud():
    ctx = S3.ctx
    solution = solve_linear(ctx, [[ctx.parse("x1")]], [ctx.parse("x1^2")])
    with pytest.raises(ValueError):
        solution.as_elements()


def test_symbolic_nullspace():
    ctx = S3.ctx
    matrix = [[ctx.parse("x1"), ctx.parse("x2")]]
    basis = nullspace(ctx, matrix)
    assert len(basis) == 1
    vec = basis[0]
    assert ctx.parse("x1") * vec[0] + ctx.parse("x2") * vec[1] == ctx.zero()
