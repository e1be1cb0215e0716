"""Exterior algebra over a declared coframe, with exact coefficients.

A ``DifferentialForm`` stores a map from ascending index tuples into the
coefficient ring of the underlying space.  Mixed-degree forms are first
class citizens because spinors are mixed by nature; homogeneity is a
property one can ask about, not a structural requirement.

The object playing the role of the space is duck-typed.  It must offer:

* ``ctx`` - the scalar context of the coefficients;
* ``dim`` - number of coframe directions;
* ``coframe_names`` - tuple of names, index position = direction;
* ``derivation_for(a)`` - derivation name for direction ``a`` (or None
  when coefficients are constant along that direction, as for the cone
  direction on invariant data);
* ``d_coframe(a)`` - the differential of the a-th coframe element.

The last two hooks are only needed by ``exterior_d``; purely pointwise
spaces may raise on them.

Sign conventions, fixed once and used everywhere downstream:

* interior product: ``i_X(a ^ b) = (i_X a) ^ b + (-1)^deg(a) a ^ (i_X b)``;
* a section ``X + xi`` acts on a form by ``i_X r + xi ^ r``;
* the top-degree pairing of two forms carries the global sign
  ``(-1)^(m choose 2)`` where ``m`` is the space dimension.
"""

from __future__ import annotations

from .ring import QQi, QQI_ONE, FunctionElement, ParseError, tokenize


class ZeroSpinorAtPoint(ValueError):
    """A pointwise spinor query hit a form that vanishes at that point."""


class PointSpace:
    """A coframe without calculus: enough structure for pointwise algebra."""

    def __init__(self, ctx, coframe_names):
        self.ctx = ctx
        self.coframe_names = tuple(coframe_names)
        self.dim = len(self.coframe_names)

    def derivation_for(self, a):
        raise TypeError("pointwise space has no derivations")

    def d_coframe(self, a):
        raise TypeError("pointwise space has no coframe differentials")


def _merge_sign(left, right):
    """Concatenate ascending index tuples; None signals a repeated index."""
    if not left:
        return right, 1
    if not right:
        return left, 1
    overlap = set(left) & set(right)
    if overlap:
        return None, 0
    swaps = 0
    for a in left:
        for b in right:
            if a > b:
                swaps += 1
    merged = tuple(sorted(left + right))
    return merged, (-1) ** swaps


class DifferentialForm:
    """Exterior form with ``FunctionElement`` coefficients."""

    __slots__ = ("space", "terms")

    def __init__(self, space, terms: dict):
        self.space = space
        self.terms = {idx: c for idx, c in terms.items() if c}

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, space) -> "DifferentialForm":
        return cls(space, {})

    @classmethod
    def from_scalar(cls, space, value) -> "DifferentialForm":
        if isinstance(value, FunctionElement):
            coeff = value
        else:
            coeff = space.ctx.constant(QQi.coerce(value))
        return cls(space, {(): coeff})

    @classmethod
    def coframe(cls, space, a: int) -> "DifferentialForm":
        return cls(space, {(a,): space.ctx.one()})

    # -- structure -------------------------------------------------------

    def _coerce(self, other) -> "DifferentialForm":
        if isinstance(other, DifferentialForm):
            if other.space is not self.space:
                raise ValueError("forms live on different spaces")
            return other
        return DifferentialForm.from_scalar(self.space, other)

    def degrees(self):
        return sorted({len(idx) for idx in self.terms})

    def degree_part(self, k: int) -> "DifferentialForm":
        return DifferentialForm(
            self.space, {idx: c for idx, c in self.terms.items() if len(idx) == k})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def has_definite_parity(self) -> bool:
        parities = {len(idx) % 2 for idx in self.terms}
        return len(parities) <= 1

    def parity(self):
        """0, 1, or None for mixed-parity forms; 0 for the zero form."""
        parities = {len(idx) % 2 for idx in self.terms}
        if not parities:
            return 0
        if len(parities) == 1:
            return parities.pop()
        return None

    # -- linear operations ----------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for idx, c in other.terms.items():
            acc = terms.get(idx)
            acc = c if acc is None else acc + c
            if acc:
                terms[idx] = acc
            elif idx in terms:
                del terms[idx]
        return DifferentialForm(self.space, terms)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __neg__(self):
        return DifferentialForm(self.space, {i: -c for i, c in self.terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, DifferentialForm):
            raise TypeError("use wedge() for form products")
        if not isinstance(scalar, FunctionElement):
            scalar = self.space.ctx.constant(QQi.coerce(scalar))
        return DifferentialForm(self.space,
                                {i: c * scalar for i, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((id(self.space), self.sort_signature()))

    def conj(self) -> "DifferentialForm":
        return DifferentialForm(self.space,
                                {i: c.conj() for i, c in self.terms.items()})

    # -- multiplicative structure ---------------------------------------

    def wedge(self, other) -> "DifferentialForm":
        other = self._coerce(other)
        out = {}
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                merged, sign = _merge_sign(i1, i2)
                if merged is None:
                    continue
                c = c1 * c2
                if sign < 0:
                    c = -c
                acc = out.get(merged)
                acc = c if acc is None else acc + c
                if acc:
                    out[merged] = acc
                elif merged in out:
                    del out[merged]
        return DifferentialForm(self.space, out)

    def interior(self, vector_coeffs) -> "DifferentialForm":
        """Contract with a vector given by frame coefficients."""
        if len(vector_coeffs) != self.space.dim:
            raise ValueError("vector coefficient list has the wrong length")
        out = DifferentialForm.zero(self.space)
        for idx, c in self.terms.items():
            for pos, a in enumerate(idx):
                comp = vector_coeffs[a]
                if not comp:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                coeff = c * comp
                if pos % 2 == 1:
                    coeff = -coeff
                out = out + DifferentialForm(self.space, {rest: coeff})
        return out

    def clifford(self, vector_coeffs, form_coeffs) -> "DifferentialForm":
        """Act by ``X + xi``: contraction plus wedge by the 1-form part."""
        one_form = DifferentialForm(
            self.space,
            {(a,): c for a, c in enumerate(form_coeffs) if c})
        return self.interior(vector_coeffs) + one_form.wedge(self)

    # -- calculus --------------------------------------------------------

    def exterior_d(self, twist=None) -> "DifferentialForm":
        """De Rham differential from the coframe table; optional twist.

        ``d(c a^I) = dc ^ a^I + c sum_j (-1)^(j-1) a^{i_1} .. d(a^{i_j}) ..``
        with ``dc`` expanded through the direction derivations.  The
        twisted variant adds ``H ^ r``.
        """
        space = self.space
        out = DifferentialForm.zero(space)
        for idx, c in self.terms.items():
            base = DifferentialForm(space, {idx: space.ctx.one()})
            dc = {}
            for a in range(space.dim):
                name = space.derivation_for(a)
                if name is None:
                    continue
                part = c.derive(name)
                if part:
                    dc[(a,)] = part
            if dc:
                out = out + DifferentialForm(space, dc).wedge(base)
            for pos, a in enumerate(idx):
                da = space.d_coframe(a)
                if da.is_zero():
                    continue
                before = DifferentialForm(space, {idx[:pos]: space.ctx.one()})
                after = DifferentialForm(space, {idx[pos + 1:]: space.ctx.one()})
                piece = before.wedge(da).wedge(after) * c
                if pos % 2 == 1:
                    piece = -piece
                out = out + piece
        if twist is not None:
            h = twist.form if hasattr(twist, "form") else twist
            out = out + h.wedge(self)
        return out

    # -- pairings and pointwise spinor geometry -------------------------

    def top_part(self) -> "DifferentialForm":
        return self.degree_part(self.space.dim)

    def transpose(self) -> "DifferentialForm":
        """Index-order reversal: the degree-k part scales by -1 for k = 2, 3 mod 4."""
        terms = {}
        for idx, c in self.terms.items():
            k = len(idx)
            terms[idx] = -c if (k * (k - 1) // 2) % 2 == 1 else c
        return DifferentialForm(self.space, terms)

    def mukai(self, other) -> "DifferentialForm":
        """Signed top-degree projection of the reversed wedge product.

        The reversal on the left factor is what keeps the pairing
        nondegenerate on even-dimensional spaces; dropping it would make
        any two equal-parity arguments cancel against each other there.
        """
        other = self._coerce(other)
        m = self.space.dim
        out = self.transpose().wedge(other).top_part()
        if (m * (m - 1) // 2) % 2 == 1:
            out = -out
        return out

    def evaluate_at(self, point, point_space=None) -> "DifferentialForm":
        """Evaluate every coefficient; result lives on a pointwise space."""
        if point_space is None:
            point_space = PointSpace(self.space.ctx.residual_context(),
                                     self.space.coframe_names)
        return DifferentialForm(
            point_space, {i: c.evaluate(point) for i, c in self.terms.items()})

    def type_at(self, point) -> int:
        """Minimum degree carrying a nonvanishing coefficient at the point."""
        evaluated = self.evaluate_at(point)
        if evaluated.is_zero():
            raise ZeroSpinorAtPoint("form vanishes at %r" % (point,))
        return min(evaluated.degrees())

    def sort_signature(self):
        items = sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return tuple((idx, c.sort_signature()) for idx, c in items)

    def monomial_name(self, idx) -> str:
        if not idx:
            return "1"
        return "^".join(self.space.coframe_names[a] for a in idx)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for idx, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            name = self.monomial_name(idx)
            if not idx:
                body = "(%s)" % (c,)
            elif c == self.space.ctx.one():
                body = name
            else:
                body = "(%s)*%s" % (c, name)
            pieces.append(body)
        return " + ".join(pieces)

    def __repr__(self):
        return "<form %s>" % (self,)


def clifford_kernel_at(r: DifferentialForm, point):
    """Exact annihilator basis of the evaluated Clifford action.

    Returns vectors of length ``2*dim`` over the residual context: frame
    coefficients first, then coframe coefficients.  Raises
    ``ZeroSpinorAtPoint`` when the form vanishes at the point.
    """
    from .linear import nullspace

    evaluated = r.evaluate_at(point)
    if evaluated.is_zero():
        raise ZeroSpinorAtPoint("form vanishes at %r" % (point,))
    space = evaluated.space
    dim = space.dim
    res = space.ctx
    zero = res.zero()
    columns = []
    monomials = set()
    for k in range(2 * dim):
        vec = [zero] * dim
        onef = [zero] * dim
        if k < dim:
            vec[k] = res.one()
        else:
            onef[k - dim] = res.one()
        image = evaluated.clifford(vec, onef)
        columns.append(image)
        monomials.update(image.terms)
    rows = sorted(monomials, key=lambda idx: (len(idx), idx))
    if not rows:
        # every generator annihilates the form already
        return [[res.one() if j == k else zero for j in range(2 * dim)]
                for k in range(2 * dim)]
    matrix = [[columns[k].terms.get(idx, zero) for k in range(2 * dim)]
              for idx in rows]
    return nullspace(res, matrix)


def is_pure_at(r: DifferentialForm, point) -> bool:
    """A spinor is pure when its pointwise annihilator has middle dimension."""
    return len(clifford_kernel_at(r, point)) == r.space.dim


class _FormParser:
    """Parser for form expressions: scalars, coframe names, ``^`` wedge.

    The scalar sublanguage matches the coefficient ring parser; a name
    that is a coframe symbol becomes a degree-1 form, and ``^`` between
    forms is the wedge product.  ``name^k`` with ``k`` a literal integer
    is accepted for scalars only (forms square to zero anyway).
    """

    def __init__(self, space, tokens):
        self.space = space
        self.coframe_index = {n: a for a, n in enumerate(space.coframe_names)}
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.take()
        if got != tok:
            raise ParseError("expected %r, found %r" % (tok, got))

    def parse(self):
        value = self.sum()
        if self.peek() is not None:
            raise ParseError("trailing input at %r" % (self.peek(),))
        return value

    def sum(self):
        if self.peek() == "-":
            self.take()
            value = -self.product()
        else:
            if self.peek() == "+":
                self.take()
            value = self.product()
        while self.peek() in ("+", "-"):
            if self.take() == "+":
                value = value + self.product()
            else:
                value = value - self.product()
        return value

    def product(self):
        value = self.wedge_chain()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.wedge_chain()
            if op == "*":
                value = self._mul(value, rhs)
            else:
                if isinstance(rhs, DifferentialForm):
                    raise ParseError("cannot divide by a form")
                value = self._mul(value, self.space.ctx.one() / rhs.constant_value())
        return value

    def _mul(self, a, b):
        if isinstance(a, DifferentialForm) and isinstance(b, DifferentialForm):
            return a.wedge(b)
        if isinstance(a, DifferentialForm):
            return a * b
        if isinstance(b, DifferentialForm):
            return b * a
        return a * b

    def wedge_chain(self):
        value = self.atom()
        while self.peek() == "^":
            self.take()
            tok = self.peek()
            if tok is not None and tok.isdigit() and not isinstance(value, DifferentialForm):
                self.take()
                value = value ** int(tok)
                continue
            rhs = self.atom()
            value = self._mul(self._as_form(value), self._as_form(rhs))
        return value

    def _as_form(self, value):
        if isinstance(value, DifferentialForm):
            return value
        return DifferentialForm.from_scalar(self.space, value)

    def atom(self):
        tok = self.take()
        if tok is None:
            raise ParseError("unexpected end of form expression")
        if tok == "(":
            value = self.sum()
            self.expect(")")
            return value
        if tok == "-":
            atom = self.atom()
            return -atom
        if tok.isdigit():
            return self.space.ctx.constant(int(tok))
        if tok == "i":
            return self.space.ctx.constant(QQi(0, 1))
        if tok in self.coframe_index:
            return DifferentialForm.coframe(self.space, self.coframe_index[tok])
        if tok in self.space.ctx.gen_index:
            return self.space.ctx.gen(tok)
        raise ParseError("unknown name %r in form expression" % (tok,))


def parse_form(space, text: str) -> DifferentialForm:
    value = _FormParser(space, tokenize(text)).parse()
    if not isinstance(value, DifferentialForm):
        value = DifferentialForm.from_scalar(space, value)
    return value
