"""Fraction-free exact linear algebra over a scalar context.

Systems here are small (frame decompositions, kernel computations,
ansatz solves), so the emphasis is on exactness and certificates rather
than asymptotics.  Elimination uses only ring operations: a pivot row is
cross-multiplied against the others, never divided.  Solutions come back
as a vector of ring numerators over one common ring denominator, and
every solve re-checks ``A * num == b * den`` before returning.

The coefficient ring is assumed to be an integral domain.  All shipped
contexts are domains (free polynomial rings, the coordinate ring of a
sphere, and a quadratic field extension), so a nonzero pivot can never
collapse a product to zero.

When the system is inconsistent the solver raises ``NoSolution`` and
attaches a certificate: exact multipliers combining the original
equations into ``0 = c`` with ``c`` a nonzero ring element.
"""

from __future__ import annotations

from .ring import ScalarContext, FunctionElement


class NoSolution(ValueError):
    """Inconsistent linear system, with an exact refutation certificate.

    ``multipliers`` is a list of ring elements, one per equation, such
    that the corresponding combination of rows of ``A`` vanishes while
    the same combination of the right-hand side equals ``certificate``,
    a nonzero ring element.
    """

    def __init__(self, certificate: FunctionElement, multipliers):
        self.certificate = certificate
        self.multipliers = list(multipliers)
        super().__init__("linear system is inconsistent: 0 = %s" % (certificate,))


class LinearSolution:
    """A solved linear system with one common ring denominator.

    The solution vector is ``numerators[j] / denominator`` with free
    variables pinned to zero.  ``denominator`` is a nonzero product of
    pivots; when it is a nonzero constant, ``as_elements`` divides it out
    and returns plain ring elements.
    """

    def __init__(self, ctx, numerators, denominator, pivot_columns, free_columns):
        self.ctx = ctx
        self.numerators = numerators
        self.denominator = denominator
        self.pivot_columns = pivot_columns
        self.free_columns = free_columns

    def is_unique(self) -> bool:
        return not self.free_columns

    def as_elements(self):
        # zero over any nonzero denominator is zero; skip the division
        if all(not num for num in self.numerators):
            return [self.ctx.zero() for _ in self.numerators]
        value = self.denominator.constant_value()
        return [num / value for num in self.numerators]


def _check_shape(ctx: ScalarContext, matrix, rhs=None):
    if not matrix:
        raise ValueError("empty coefficient matrix")
    width = len(matrix[0])
    for row in matrix:
        if len(row) != width:
            raise ValueError("ragged coefficient matrix")
        for entry in row:
            if not isinstance(entry, FunctionElement) or entry.ctx is not ctx:
                raise ValueError("matrix entries must belong to the given context")
    if rhs is not None and len(rhs) != len(matrix):
        raise ValueError("right-hand side has the wrong length")
    return width


def _eliminate(ctx: ScalarContext, matrix, rhs):
    """Fraction-free Gauss-Jordan pass over the augmented, tracked system.

    Each working row carries the current coefficients, the transformed
    right-hand side and the multipliers expressing it in terms of the
    original equations.  Pivot choice is deterministic: the first row
    whose candidate entry is a nonzero constant, else the first row with
    any nonzero entry.  Constant pivots keep the accumulated denominator
    constant whenever the system allows it, which downstream code relies
    on for exact certificate extraction.
    """
    nrows = len(matrix)
    width = len(matrix[0])
    zero = ctx.zero()
    one = ctx.one()
    rows = []
    for k in range(nrows):
        tracker = [one if t == k else zero for t in range(nrows)]
        rows.append([list(matrix[k]), rhs[k], tracker])
    pivots = []
    rank = 0
    for col in range(width):
        pivot_row = None
        for k in range(rank, nrows):
            entry = rows[k][0][col]
            if entry and entry.is_constant():
                pivot_row = k
                break
        if pivot_row is None:
            for k in range(rank, nrows):
                if rows[k][0][col]:
                    pivot_row = k
                    break
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        pcoeffs, prhs, ptrack = rows[rank]
        pivot = pcoeffs[col]
        for k in range(nrows):
            if k == rank or not rows[k][0][col]:
                continue
            coeffs, value, track = rows[k]
            factor = coeffs[col]
            rows[k] = [
                [pivot * coeffs[t] - factor * pcoeffs[t] for t in range(width)],
                pivot * value - factor * prhs,
                [pivot * track[t] - factor * ptrack[t] for t in range(nrows)],
            ]
        pivots.append((rank, col))
        rank += 1
    return rows, pivots


def solve_linear(ctx: ScalarContext, matrix, rhs) -> LinearSolution:
    """Solve ``A x = b`` exactly, certifying inconsistency.

    Free variables are set to zero, which keeps the answer deterministic.
    The result satisfies ``A * numerators == b * denominator`` entry by
    entry; that identity is verified here, not assumed.
    """
    width = _check_shape(ctx, matrix, rhs)
    rows, pivots = _eliminate(ctx, matrix, rhs)
    for coeffs, value, track in rows:
        if value and all(not c for c in coeffs):
            raise NoSolution(value, track)
    pivot_values = [rows[r][0][c] for r, c in pivots]
    denominator = ctx.one()
    for pv in pivot_values:
        denominator = denominator * pv
    numerators = [ctx.zero() for _ in range(width)]
    for idx, (r, c) in enumerate(pivots):
        cofactor = ctx.one()
        for jdx, pv in enumerate(pivot_values):
            if jdx != idx:
                cofactor = cofactor * pv
        numerators[c] = rows[r][1] * cofactor
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(width) if c not in pivot_cols]
    for k in range(len(matrix)):
        acc = ctx.zero()
        for j in range(width):
            acc = acc + matrix[k][j] * numerators[j]
        if acc != rhs[k] * denominator:
            raise AssertionError("solver verification failed on equation %d" % (k,))
    return LinearSolution(ctx, numerators, denominator, pivot_cols, free_cols)


def nullspace(ctx: ScalarContext, matrix):
    """Ring-valued spanning vectors for the kernel of ``A``.

    One vector per free column, cleared of denominators, each verified
    to satisfy ``A v = 0``.  An empty list means the kernel is trivial.
    """
    width = _check_shape(ctx, matrix)
    zero_rhs = [ctx.zero() for _ in matrix]
    rows, pivots = _eliminate(ctx, matrix, zero_rhs)
    pivot_values = [rows[r][0][c] for r, c in pivots]
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(width) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = [ctx.zero() for _ in range(width)]
        full = ctx.one()
        for pv in pivot_values:
            full = full * pv
        vec[f] = full
        for idx, (r, c) in enumerate(pivots):
            cofactor = ctx.one()
            for jdx, pv in enumerate(pivot_values):
                if jdx != idx:
                    cofactor = cofactor * pv
            vec[c] = -(rows[r][0][f] * cofactor)
        for row in matrix:
            acc = ctx.zero()
            for j in range(width):
                acc = acc + row[j] * vec[j]
            if acc:
                raise AssertionError("nullspace verification failed")
        basis.append(vec)
    return basis


def matrix_rank(ctx: ScalarContext, matrix) -> int:
    _check_shape(ctx, matrix)
    zero_rhs = [ctx.zero() for _ in matrix]
    _, pivots = _eliminate(ctx, matrix, zero_rhs)
    return len(pivots)
