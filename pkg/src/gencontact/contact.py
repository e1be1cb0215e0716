"""Odd-dimensional analogues of complex structures on a frame model.

The objects of study are rank-2 subbundles E of the generalized tangent
bundle on which the canonical pairing is nondegenerate of split
signature, together with a maximal isotropic complement L inside the
complexified orthogonal of E.  Three equivalent presentations circulate:

* a ``ContactPair`` (E, L) given by explicit section frames;
* a ``ContactTriple`` (Phi, e1, e2): an endomorphism squaring to a
  reflection around the E-directions, with L recovered as an
  eigenbundle;
* a ``MixedPair`` of spinor forms whose annihilators cut out L
  together with one E-direction each.

A ``SekiyaQuadruple`` relaxes the triple by an eigenvalue parameter and
is the exact counterpart of a complex structure on the cone extension of
the model; ``sekiya_to_cone`` and ``cone_to_sekiya`` realize that
correspondence and are mutually inverse.

Decision procedures (``integrability_check``, ``normality_check``,
``normal_frame_criterion``, ``mixed_pair_integrability``) return
verdicts carrying exact symbolic residuals or certificates, never
floating point approximations.  A verdict that cannot be decided by the
implemented search reports itself as inconclusive instead of guessing.
"""

from __future__ import annotations

from fractions import Fraction
import math

from .ring import QQi, FunctionElement
from .linear import NoSolution, solve_linear, nullspace, matrix_rank
from .forms import (DifferentialForm, ZeroSpinorAtPoint, clifford_kernel_at,
                    is_pure_at)
from .frame import (GenSection, inner_product, dorfman, script_d, b_transform)


class StructureError(ValueError):
    """A declared structure violates one of its defining identities."""


class FrameSearchFailed(StructureError):
    """The built-in frame heuristic gave up; the input needs a better frame."""


HALF = Fraction(1, 2)


def fraction_sqrt(value: Fraction) -> Fraction:
    """Exact square root of a rational, or ValueError."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative radicand %s" % (value,))
    rn = math.isqrt(value.numerator)
    rd = math.isqrt(value.denominator)
    if rn * rn != value.numerator or rd * rd != value.denominator:
        raise ValueError("%s is not a perfect rational square" % (value,))
    return Fraction(rn, rd)


def _scalar(model, value) -> FunctionElement:
    if isinstance(value, FunctionElement):
        return model.ctx._own(value)
    if isinstance(value, str):
        return model.ctx.parse(value)
    return model.ctx.constant(QQi.coerce(value))


def _half(model) -> FunctionElement:
    return model.ctx.constant(QQi.coerce(HALF))


def _imag_unit(model) -> FunctionElement:
    return model.ctx.constant(QQi(Fraction(0), Fraction(1)))


def _coordinate_rows(sections):
    return [s.coordinates() for s in sections]


def _basis_matrix(model, basis):
    """Columns are the coordinate vectors of the basis sections."""
    cols = [b.coordinates() for b in basis]
    return [[cols[j][i] for j in range(len(basis))] for i in range(2 * model.dim)]


def decompose(section: GenSection, basis) -> list:
    """Exact coefficients of a section over a section basis.

    Requires the accumulated solver denominator to be constant, which the
    constant-preference pivoting guarantees for every shipped basis; a
    function denominator would make coefficient extraction ambiguous, so
    it is treated as an error rather than silently divided.
    """
    model = section.model
    matrix = _basis_matrix(model, basis)
    sol = solve_linear(model.ctx, matrix, section.coordinates())
    try:
        return sol.as_elements()
    except ValueError:
        raise StructureError("decomposition denominator %s is not constant"
                             % (sol.denominator,))


def in_span(section: GenSection, basis) -> bool:
    model = section.model
    matrix = _basis_matrix(model, basis)
    try:
        solve_linear(model.ctx, matrix, section.coordinates())
    except NoSolution:
        return False
    return True


def _sections_rank(model, sections) -> int:
    if not sections:
        return 0
    return matrix_rank(model.ctx, _coordinate_rows(sections))


def _complete_basis(model, span, candidates):
    """Greedily extend a section list to a full coordinate basis."""
    basis = list(span)
    rank = _sections_rank(model, basis)
    full = 2 * model.dim
    for cand in candidates:
        if rank == full:
            break
        trial = matrix_rank(model.ctx, _coordinate_rows(basis + [cand]))
        if trial > rank:
            basis.append(cand)
            rank = trial
    if rank != full:
        raise StructureError("could not complete the section basis")
    return basis


def _evaluated_matrix(model, coefficient_rows, point):
    res = model.ctx.residual_context()
    return res, [[c.evaluate(point) for c in row] for row in coefficient_rows]


def _rank_at(model, coefficient_rows, point) -> int:
    if not coefficient_rows:
        return 0
    res, rows = _evaluated_matrix(model, coefficient_rows, point)
    return matrix_rank(res, rows)


def _conj_split(model, value: FunctionElement):
    """Real and imaginary parts of an element of a conjugation-stable ring."""
    half = _half(model)
    minus_half_i = model.ctx.constant(QQi(Fraction(0), Fraction(-1, 2)))
    re = (value + value.conj()) * half
    im = (value - value.conj()) * minus_half_i
    return re, im


# ---------------------------------------------------------------------------
# geometric type


class GeometricType:
    """Per-sample-point pairs (p, t) with the dimension window enforced.

    p is the rank of the anchor image of E and t the corank of the
    anchor image of L, both computed exactly at each sample point.  On a
    model of dimension 2n+1 only p in {1, 2} can occur, with t capped at
    n+1 and n respectively; a value outside the window means the input
    was not a valid structure, so construction fails hard.
    """

    def __init__(self, model, pairs):
        self.model = model
        self.pairs = [(int(p), int(t)) for p, t in pairs]
        n = (model.dim - 1) // 2
        for p, t in self.pairs:
            if p not in (1, 2):
                raise StructureError("anchor rank of E must be 1 or 2, got %d" % p)
            top = n + 1 if p == 1 else n
            if not 1 <= t <= top:
                raise StructureError(
                    "type (%d,%d) falls outside the window 1..%d" % (p, t, top))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        if isinstance(other, GeometricType):
            return self.pairs == other.pairs
        return self.pairs == [(int(p), int(t)) for p, t in other]

    def __str__(self):
        return " ".join("(%d,%d)" % pt for pt in self.pairs)

    def __repr__(self):
        return "<types %s>" % (self,)


# ---------------------------------------------------------------------------
# pairs


class ContactPair:
    """Section frames for E and L, validated on construction.

    E carries the split-signature restriction of the pairing (checked as
    a negative Gram determinant at every sample point), L is isotropic,
    orthogonal to E, of complex rank dim-1, and meets its conjugate in
    zero at every sample point.
    """

    __slots__ = ("model", "e1", "e2", "l_sections")

    def __init__(self, model, e_frame, l_sections, validate=True):
        e1, e2 = e_frame
        if e1.model is not model or e2.model is not model:
            raise StructureError("E frame does not live on the given model")
        self.model = model
        self.e1 = e1
        self.e2 = e2
        self.l_sections = tuple(l_sections)
        for l in self.l_sections:
            if l.model is not model:
                raise StructureError("L frame does not live on the given model")
        if validate:
            self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self):
        model = self.model
        expected = model.dim - 1
        if len(self.l_sections) != expected:
            raise StructureError("L needs %d generators, got %d"
                                 % (expected, len(self.l_sections)))
        g11 = inner_product(self.e1, self.e1)
        g12 = inner_product(self.e1, self.e2)
        g22 = inner_product(self.e2, self.e2)
        det = g11 * g22 - g12 * g12
        for point in model.points:
            value = det.evaluate(point)
            if not value.is_constant():
                raise StructureError("Gram determinant is not numeric at a point")
            number = value.constant_value()
            if number.im != 0 or number.re >= 0:
                raise StructureError(
                    "pairing on E must have split signature; determinant %s"
                    % (number,))
        for k, l in enumerate(self.l_sections):
            if inner_product(l, self.e1) or inner_product(l, self.e2):
                raise StructureError("L generator %d is not orthogonal to E" % k)
            for j in range(k, len(self.l_sections)):
                if inner_product(l, self.l_sections[j]):
                    raise StructureError(
                        "L is not isotropic at generators (%d,%d)" % (k, j))
        if _sections_rank(model, list(self.l_sections)) != expected:
            raise StructureError("L frame is degenerate")
        rows = _coordinate_rows(list(self.l_sections))
        conj_rows = _coordinate_rows([l.conj() for l in self.l_sections])
        for point in model.points:
            if _rank_at(model, rows, point) != expected:
                raise StructureError("L drops rank at a sample point")
            if _rank_at(model, rows + conj_rows, point) != 2 * expected:
                raise StructureError("L meets its conjugate at a sample point")

    # -- views -----------------------------------------------------------

    def e_sections(self):
        return [self.e1, self.e2]

    def conj_l(self):
        return [l.conj() for l in self.l_sections]

    def equivalent_to(self, other: "ContactPair") -> bool:
        """Span equality of both frames, decided by exact membership."""
        if self.model is not other.model:
            return False
        mine_e, other_e = self.e_sections(), other.e_sections()
        mine_l, other_l = list(self.l_sections), list(other.l_sections)
        return (all(in_span(x, other_e) for x in mine_e)
                and all(in_span(x, mine_e) for x in other_e)
                and all(in_span(x, other_l) for x in mine_l)
                and all(in_span(x, mine_l) for x in other_l))

    def __repr__(self):
        return "<pair on %s: E=(%s; %s), rank L=%d>" % (
            self.model.name, self.e1, self.e2, len(self.l_sections))


def geometric_type(pair: ContactPair) -> GeometricType:
    """Exact (p, t) at every sample point of the pair's model."""
    model = pair.model
    if model.dim % 2 == 0:
        raise StructureError("geometric type needs an odd-dimensional model")
    e_rows = [list(pair.e1.vec), list(pair.e2.vec)]
    l_rows = [list(l.vec) for l in pair.l_sections]
    pairs = []
    for point in model.points:
        p = _rank_at(model, e_rows, point)
        t = model.dim - _rank_at(model, l_rows, point)
        pairs.append((p, t))
    return GeometricType(model, pairs)


# ---------------------------------------------------------------------------
# triples


def phi_from_images(model, images):
    """Endomorphism matrix whose columns are images of the generators."""
    if len(images) != 2 * model.dim:
        raise StructureError("need one image per generator section")
    cols = [img.coordinates() for img in images]
    return tuple(tuple(cols[j][i] for j in range(2 * model.dim))
                 for i in range(2 * model.dim))


class ContactTriple:
    """Endomorphism presentation (Phi, e1, e2) of a pair.

    Phi kills the normalized isotropic frame e1, e2, is antisymmetric
    for the pairing, and squares to minus the identity corrected by the
    reflection around the frame directions.  All identities are checked
    symbolically on the generator sections.
    """

    __slots__ = ("model", "phi", "e1", "e2")

    def __init__(self, model, phi, e1, e2, validate=True):
        self.model = model
        self.phi = tuple(tuple(model.ctx._own(entry) for entry in row)
                         for row in phi)
        self.e1 = e1
        self.e2 = e2
        size = 2 * model.dim
        if len(self.phi) != size or any(len(row) != size for row in self.phi):
            raise StructureError("endomorphism matrix must be %dx%d" % (size, size))
        if validate:
            self._validate()

    def apply(self, x: GenSection) -> GenSection:
        if x.model is not self.model:
            raise StructureError("section lives on a different model")
        coords = x.coordinates()
        out = []
        for row in self.phi:
            acc = self.model.ctx.zero()
            for entry, c in zip(row, coords):
                if entry and c:
                    acc = acc + entry * c
            out.append(acc)
        m = self.model.dim
        return GenSection(self.model, out[:m], out[m:])

    def _validate(self):
        model = self.model
        half = _half(model)
        if inner_product(self.e1, self.e1) or inner_product(self.e2, self.e2):
            raise StructureError("frame sections must be isotropic")
        if inner_product(self.e1, self.e2) != half:
            raise StructureError("frame pairing must normalize to one half")
        if self.apply(self.e1) or self.apply(self.e2):
            raise StructureError("endomorphism must kill the frame sections")
        self._antisymmetry_ok()
        two = model.ctx.constant(2)
        for gen in model.generator_sections():
            twice = self.apply(self.apply(gen))
            target = (-gen
                      + (two * inner_product(gen, self.e1)) * self.e2
                      + (two * inner_product(gen, self.e2)) * self.e1)
            if twice != target:
                raise StructureError("square identity fails on %s" % (gen,))

    def _antisymmetry_ok(self):
        # G = half * [[0, I], [I, 0]]; the condition Phi^T G + G Phi = 0
        # reads phi[m+j][i] + phi[m+i][j] = 0 and its three block mates.
        m = self.model.dim
        phi = self.phi
        for i in range(2 * self.model.dim):
            for j in range(2 * self.model.dim):
                left = phi[(i + m) % (2 * m)][j]
                right = phi[(j + m) % (2 * m)][i]
                if left + right:
                    raise StructureError(
                        "pairing antisymmetry fails at entry (%d,%d)" % (i, j))

    def __repr__(self):
        return "<triple on %s: e1=%s, e2=%s>" % (self.model.name, self.e1, self.e2)


class PhiBlocks:
    """The four blocks of an endomorphism for the vector/form splitting.

    Stored as A (vectors to vectors), B (forms to vectors) and C
    (vectors to forms); the forms-to-forms block is forced to be minus
    the transpose of A and is checked rather than stored.  B and C are
    skew.
    """

    __slots__ = ("a", "b", "c")

    def __init__(self, a, b, c):
        self.a = a
        self.b = b
        self.c = c


def phi_blocks(triple: ContactTriple) -> PhiBlocks:
    m = triple.model.dim
    phi = triple.phi
    a = tuple(tuple(phi[i][j] for j in range(m)) for i in range(m))
    b = tuple(tuple(phi[i][m + j] for j in range(m)) for i in range(m))
    c = tuple(tuple(phi[m + i][j] for j in range(m)) for i in range(m))
    for i in range(m):
        for j in range(m):
            if phi[m + i][m + j] != -a[j][i]:
                raise StructureError("lower right block is not minus the dual")
            if b[i][j] + b[j][i]:
                raise StructureError("forms-to-vectors block is not skew")
            if c[i][j] + c[j][i]:
                raise StructureError("vectors-to-forms block is not skew")
    return PhiBlocks(a, b, c)


def eperp_frame(model, e1, e2):
    """A spanning frame for the orthogonal of span(e1, e2)."""
    row1 = [inner_product(gen, e1) for gen in model.generator_sections()]
    row2 = [inner_product(gen, e2) for gen in model.generator_sections()]
    vectors = nullspace(model.ctx, [row1, row2])
    m = model.dim
    out = [GenSection(model, v[:m], v[m:]) for v in vectors]
    if len(out) != 2 * m - 2:
        raise StructureError("orthogonal complement has unexpected rank")
    return out


def _normalized_frame(pair: ContactPair):
    """The pair's frame, rescaled to the standard pairing when possible."""
    model = pair.model
    e1, e2 = pair.e1, pair.e2
    if inner_product(e1, e1) or inner_product(e2, e2):
        raise FrameSearchFailed("declared frame is not isotropic; "
                                "no rescaling heuristic applies")
    g12 = inner_product(e1, e2)
    if g12 == _half(model):
        return e1, e2
    if not g12.is_constant() or not g12:
        raise FrameSearchFailed("frame pairing %s cannot be normalized by a "
                                "constant rescaling" % (g12,))
    scale = QQi.coerce(HALF) / g12.constant_value()
    return e1, model.ctx.constant(scale) * e2


def triple_from_pair(pair: ContactPair, frame=None) -> ContactTriple:
    """Reconstruct the endomorphism presentation from the section frames.

    The optional ``frame`` is a 2x2 constant matrix acting on (e1, e2);
    it must preserve the normalization, which the resulting triple's own
    validation enforces.  The endomorphism multiplies L by the imaginary
    unit, its conjugate frame by minus that, and kills E; the matrix is
    assembled column by column from exact decompositions.
    """
    model = pair.model
    e1, e2 = _normalized_frame(pair)
    if frame is not None:
        (r11, r12), (r21, r22) = frame
        new1 = _scalar(model, r11) * e1 + _scalar(model, r12) * e2
        new2 = _scalar(model, r21) * e1 + _scalar(model, r22) * e2
        e1, e2 = new1, new2
    basis = [e1, e2] + list(pair.l_sections) + pair.conj_l()
    if _sections_rank(model, basis) != 2 * model.dim:
        raise StructureError("frame plus L plus conjugate does not span")
    i_unit = _imag_unit(model)
    rank_l = len(pair.l_sections)
    images = []
    for gen in model.generator_sections():
        coeffs = decompose(gen, basis)
        image = model.zero_section()
        for k, l in enumerate(pair.l_sections):
            c = coeffs[2 + k]
            if c:
                image = image + (c * i_unit) * l
        for k, lbar in enumerate(pair.conj_l()):
            c = coeffs[2 + rank_l + k]
            if c:
                image = image - (c * i_unit) * lbar
        images.append(image)
    phi = phi_from_images(model, images)
    return ContactTriple(model, phi, e1, e2)


def pair_from_triple(triple: ContactTriple) -> ContactPair:
    """Recover (E, L) with L framed by eigen-combinations x - i Phi x."""
    model = triple.model
    i_unit = _imag_unit(model)
    candidates = []
    for x in eperp_frame(model, triple.e1, triple.e2):
        candidates.append(x - i_unit * triple.apply(x))
    chosen = []
    rank = 0
    target = model.dim - 1
    for cand in candidates:
        if rank == target:
            break
        trial = matrix_rank(model.ctx, _coordinate_rows(chosen + [cand]))
        if trial > rank:
            chosen.append(cand)
            rank = trial
    if rank != target:
        raise StructureError("eigenframe construction fell short of rank %d"
                             % (target,))
    return ContactPair(model, (triple.e1, triple.e2), chosen)


# ---------------------------------------------------------------------------
# split frames and gauge reduction


class PoonWadeResult:
    """Outcome of the split-frame test, with witnesses when it holds."""

    __slots__ = ("holds", "vector_witness", "form_witness")

    def __init__(self, holds, vector_witness=None, form_witness=None):
        self.holds = holds
        self.vector_witness = vector_witness
        self.form_witness = form_witness

    def __bool__(self):
        return self.holds

    def __repr__(self):
        if not self.holds:
            return "<no split frame>"
        return "<split frame: %s | %s>" % (self.vector_witness, self.form_witness)


def _e_combination_with(pair, rows):
    """A nonzero combination of the E frame killed by the given slot rows."""
    model = pair.model
    e1c = pair.e1.coordinates()
    e2c = pair.e2.coordinates()
    matrix = [[e1c[r], e2c[r]] for r in rows]
    kernel = nullspace(model.ctx, matrix)
    if not kernel:
        return None, None
    lam, mu = kernel[0]
    return lam * pair.e1 + mu * pair.e2, (lam, mu)


def is_poon_wade(pair: ContactPair) -> PoonWadeResult:
    """Does E split into a purely tangent and a purely cotangent line?"""
    m = pair.model.dim
    vector_part, _ = _e_combination_with(pair, list(range(m, 2 * m)))
    form_part, _ = _e_combination_with(pair, list(range(m)))
    if vector_part is None or form_part is None:
        return PoonWadeResult(False)
    return PoonWadeResult(True, vector_part, form_part)


class ReduceResult:
    """Gauge 2-form plus the transformed structure and recognizer data."""

    __slots__ = ("omega", "pair", "triple", "theta", "eta", "notes")

    def __init__(self, omega, pair, triple=None, theta=None, eta=None, notes=()):
        self.omega = omega
        self.pair = pair
        self.triple = triple
        self.theta = theta
        self.eta = eta
        self.notes = tuple(notes)


def _transform_pair(pair: ContactPair, omega: DifferentialForm) -> ContactPair:
    e1 = b_transform(omega, pair.e1)
    e2 = b_transform(omega, pair.e2)
    ls = [b_transform(omega, l) for l in pair.l_sections]
    return ContactPair(pair.model, (e1, e2), ls)


def _conjugate_triple(triple: ContactTriple, omega: DifferentialForm) -> ContactTriple:
    model = triple.model
    images = []
    for gen in model.generator_sections():
        images.append(b_transform(omega, triple.apply(b_transform(-omega, gen))))
    phi = phi_from_images(model, images)
    return ContactTriple(model, phi,
                         b_transform(omega, triple.e1),
                         b_transform(omega, triple.e2))


def _require_type(pair, p_wanted, t_wanted=None):
    types = geometric_type(pair)
    for k, (p, t) in enumerate(types):
        if p != p_wanted:
            raise StructureError(
                "reduction needs anchor rank %d, found %d at point %d"
                % (p_wanted, p, k))
        if t_wanted is not None and t != t_wanted:
            raise StructureError(
                "reduction needs type %d, found %d at point %d"
                % (t_wanted, t, k))


def _general_reduce(pair: ContactPair):
    """Gauge E so one frame section becomes purely tangent.

    Picks a purely cotangent combination beta inside E, completes it
    with the more independent declared section, normalizes, and applies
    the wedge of the two 1-form parts as the gauge.
    """
    model = pair.model
    m = model.dim
    beta_sec, combo = _e_combination_with(pair, list(range(m)))
    if beta_sec is None:
        raise FrameSearchFailed("E contains no purely cotangent line")
    lam, mu = combo
    partner = pair.e2 if lam else pair.e1
    g = inner_product(partner, beta_sec)
    if not g.is_constant() or not g:
        raise FrameSearchFailed("cannot normalize the split frame by a constant")
    scale = QQi.coerce(HALF) / g.constant_value()
    beta_sec = model.ctx.constant(scale) * beta_sec
    # make the partner isotropic against itself; beta is isotropic already
    s = inner_product(partner, partner)
    if s:
        partner = partner - s * beta_sec
    omega = partner.one_form().wedge(beta_sec.one_form())
    new_pair = _transform_pair(
        ContactPair(model, (partner, beta_sec), pair.l_sections, validate=False),
        omega)
    if not new_pair.e1.vector_only():
        raise StructureError("gauge failed to produce a tangent section")
    return omega, new_pair


def _theta_from_block(model, block):
    terms = {}
    for a in range(model.dim):
        for b in range(a + 1, model.dim):
            coeff = block[b][a]
            if coeff:
                terms[(a, b)] = coeff
    return DifferentialForm(model, terms)


def _cosymplectic_axioms_ok(model, theta, eta, xi_section):
    n = (model.dim - 1) // 2
    if eta.interior(xi_section.vec) != DifferentialForm.from_scalar(model, 1):
        return "eta does not normalize against the tangent witness"
    if theta.interior(xi_section.vec):
        return "tangent witness does not contract theta to zero"
    volume = eta
    for _ in range(n):
        volume = volume.wedge(theta)
    for point in model.points:
        if volume.evaluate_at(point).is_zero():
            return "volume form vanishes at a sample point"
    return None


def cosymplectic_structure(model, theta: DifferentialForm, eta: DifferentialForm):
    """Pair and triple from a 2-form and 1-form of full joint volume.

    The tangent witness is the unique vector normalizing eta and
    contracting theta to zero; the isotropic complement is framed by
    tangent kernel directions paired with minus i times their theta
    contraction.
    """
    m = model.dim
    eta_coeffs = [eta.terms.get((a,), model.ctx.zero()) for a in range(m)]
    rows = []
    rhs = []
    rows.append(eta_coeffs)
    rhs.append(model.ctx.one())
    for b in range(m):
        row = []
        for a in range(m):
            if a < b:
                row.append(theta.terms.get((a, b), model.ctx.zero()))
            elif a > b:
                row.append(-theta.terms.get((b, a), model.ctx.zero()))
            else:
                row.append(model.ctx.zero())
        rows.append(row)
        rhs.append(model.ctx.zero())
    try:
        sol = solve_linear(model.ctx, rows, rhs)
    except NoSolution:
        raise StructureError("no tangent witness normalizes eta and kills "
                             "theta; the input pair is degenerate")
    xi_vec = sol.as_elements()
    xi = GenSection(model, xi_vec, [model.ctx.zero()] * m)
    problem = _cosymplectic_axioms_ok(model, theta, eta, xi)
    if problem:
        raise StructureError(problem)
    eta_sec = GenSection(model, [model.ctx.zero()] * m,
                         [eta.terms.get((a,), model.ctx.zero()) for a in range(m)])
    i_unit = _imag_unit(model)
    l_sections = []
    for kernel_vec in nullspace(model.ctx, [eta_coeffs]):
        contracted = theta.interior(kernel_vec)
        form = [-(i_unit * contracted.terms.get((a,), model.ctx.zero()))
                for a in range(m)]
        l_sections.append(GenSection(model, kernel_vec, form))
    pair = ContactPair(model, (xi, eta_sec), l_sections)
    return pair, triple_from_pair(pair)


def _almost_contact_axioms_ok(model, phi_matrix, xi_vec, eta_coeffs):
    m = model.dim
    zero = model.ctx.zero()
    for i in range(m):
        if sum((phi_matrix[i][j] * xi_vec[j] for j in range(m)), zero):
            return "endomorphism does not kill the tangent witness"
        if sum((eta_coeffs[j] * phi_matrix[j][i] for j in range(m)), zero):
            return "eta does not annihilate the endomorphism image"
    if sum((eta_coeffs[j] * xi_vec[j] for j in range(m)), zero) != model.ctx.one():
        return "eta does not normalize against the tangent witness"
    for i in range(m):
        for j in range(m):
            acc = zero
            for k in range(m):
                acc = acc + phi_matrix[i][k] * phi_matrix[k][j]
            want = xi_vec[i] * eta_coeffs[j]
            if i == j:
                want = want - model.ctx.one()
            if acc != want:
                return "square identity fails at entry (%d,%d)" % (i, j)
    return None


def almost_contact_structure(model, phi_matrix, xi: GenSection, eta: GenSection):
    """Pair and triple from a tangent endomorphism with a framed kernel."""
    m = model.dim
    phi_matrix = tuple(tuple(model.ctx._own(c) for c in row) for row in phi_matrix)
    if not xi.vector_only() or not eta.form_only():
        raise StructureError("witnesses must be purely tangent and cotangent")
    problem = _almost_contact_axioms_ok(model, phi_matrix, list(xi.vec),
                                        list(eta.form))
    if problem:
        raise StructureError(problem)
    zero = model.ctx.zero()
    full = []
    for i in range(2 * m):
        row = []
        for j in range(2 * m):
            if i < m and j < m:
                row.append(phi_matrix[i][j])
            elif i >= m and j >= m:
                row.append(-phi_matrix[j - m][i - m])
            else:
                row.append(zero)
        full.append(row)
    triple = ContactTriple(model, full, xi, eta)
    return pair_from_triple(triple), triple


def poon_wade_reduce(pair: ContactPair, mode: str = "general") -> ReduceResult:
    """Gauge a rank-one-anchor pair into split form, then specialize.

    ``general`` stops at a split frame.  ``cosymplectic`` (type t = 1)
    additionally gauges the endomorphism into the block form carried by
    a 2-form/1-form structure and runs that recognizer; ``contact``
    (type t = n+1) gauges it into the block-diagonal form of a tangent
    endomorphism structure.
    """
    model = pair.model
    n = (model.dim - 1) // 2
    if mode == "general":
        _require_type(pair, 1)
        omega, reduced = _general_reduce(pair)
        return ReduceResult(omega, reduced)
    if mode == "cosymplectic":
        _require_type(pair, 1, 1)
        omega0, reduced = _general_reduce(pair)
        triple = triple_from_pair(reduced)
        blocks = phi_blocks(triple)
        m = model.dim
        b_matrix = [[blocks.b[i][j] for j in range(m)] for i in range(m)]
        columns = []
        for a in range(m):
            rhs = [blocks.a[i][a] for i in range(m)]
            try:
                sol = solve_linear(model.ctx, b_matrix, rhs)
            except NoSolution:
                raise StructureError(
                    "forms-to-vectors block cannot absorb the tangent block "
                    "in direction %d" % (a,))
            columns.append(sol.as_elements())
        half = _half(model)
        terms = {}
        for a in range(m):
            for b in range(a + 1, m):
                coeff = half * (columns[a][b] - columns[b][a])
                if coeff:
                    terms[(a, b)] = coeff
        omega1 = DifferentialForm(model, terms)
        gauged = _conjugate_triple(triple, omega1)
        final_pair = _transform_pair(reduced, omega1)
        notes = []
        theta = eta = None
        if gauged.e1.vector_only() and gauged.e2.form_only():
            theta = _theta_from_block(model, phi_blocks(gauged).c)
            eta = gauged.e2.one_form()
            problem = _cosymplectic_axioms_ok(model, theta, eta, gauged.e1)
            if problem:
                raise StructureError("recognizer: %s" % (problem,))
            rebuilt, _ = cosymplectic_structure(model, theta, eta)
            if not rebuilt.equivalent_to(final_pair):
                raise StructureError("recognizer: rebuilt structure disagrees")
            notes.append("recognized: 2-form/1-form structure")
        else:
            raise StructureError("recognizer: gauged frame is not split")
        return ReduceResult(omega0 + omega1, final_pair, gauged, theta, eta, notes)
    if mode == "contact":
        _require_type(pair, 1, n + 1)
        omega0, reduced = _general_reduce(pair)
        triple = triple_from_pair(reduced)
        blocks = phi_blocks(triple)
        m = model.dim
        for i in range(m):
            for j in range(m):
                if blocks.b[i][j]:
                    raise StructureError(
                        "forms-to-vectors block should vanish for this type")
        half = _half(model)
        terms = {}
        for a in range(m):
            for b in range(m):
                acc = model.ctx.zero()
                for k in range(m):
                    acc = acc + blocks.c[b][k] * blocks.a[k][a]
                acc = half * acc
                if a < b and acc:
                    terms[(a, b)] = acc
                if a > b and acc != -terms.get((b, a), model.ctx.zero()):
                    raise StructureError("gauge candidate is not a 2-form")
        omega1 = DifferentialForm(model, terms)
        gauged = _conjugate_triple(triple, omega1)
        final_pair = _transform_pair(reduced, omega1)
        notes = []
        if not (gauged.e1.vector_only() and gauged.e2.form_only()):
            raise StructureError("recognizer: gauged frame is not split")
        new_blocks = phi_blocks(gauged)
        for i in range(m):
            for j in range(m):
                if new_blocks.b[i][j] or new_blocks.c[i][j]:
                    raise StructureError("recognizer: off-diagonal blocks remain")
        eta = gauged.e2.one_form()
        eta_coeffs = [eta.terms.get((a,), model.ctx.zero()) for a in range(m)]
        problem = _almost_contact_axioms_ok(model, new_blocks.a,
                                            list(gauged.e1.vec), eta_coeffs)
        if problem:
            raise StructureError("recognizer: %s" % (problem,))
        notes.append("recognized: tangent endomorphism structure")
        return ReduceResult(omega0 + omega1, final_pair, gauged, None, eta, notes)
    raise ValueError("unknown reduction mode %r" % (mode,))


# ---------------------------------------------------------------------------
# quadruples and the cone


class SekiyaQuadruple:
    """Triple relaxed by an eigenvalue on the frame directions."""

    __slots__ = ("model", "phi", "e1", "e2", "lam")

    def __init__(self, model, phi, e1, e2, lam, validate=True):
        self.model = model
        self.phi = tuple(tuple(model.ctx._own(entry) for entry in row)
                         for row in phi)
        self.e1 = e1
        self.e2 = e2
        self.lam = _scalar(model, lam)
        if validate:
            self._validate()

    apply = ContactTriple.apply
    _antisymmetry_ok = ContactTriple._antisymmetry_ok

    def _validate(self):
        model = self.model
        half = _half(model)
        if inner_product(self.e1, self.e1) or inner_product(self.e2, self.e2):
            raise StructureError("frame sections must be isotropic")
        if inner_product(self.e1, self.e2) != half:
            raise StructureError("frame pairing must normalize to one half")
        if self.apply(self.e1) != self.lam * self.e1:
            raise StructureError("first frame section is not an eigenvector")
        if self.apply(self.e2) != (-self.lam) * self.e2:
            raise StructureError("second frame section is not an eigenvector")
        self._antisymmetry_ok()
        two = model.ctx.constant(2)
        factor = two * (model.ctx.one() + self.lam * self.lam)
        for gen in model.generator_sections():
            twice = self.apply(self.apply(gen))
            target = (-gen
                      + (factor * inner_product(gen, self.e2)) * self.e1
                      + (factor * inner_product(gen, self.e1)) * self.e2)
            if twice != target:
                raise StructureError("square identity fails on %s" % (gen,))

    def __eq__(self, other):
        if not isinstance(other, SekiyaQuadruple):
            return NotImplemented
        return (self.model is other.model and self.phi == other.phi
                and self.e1 == other.e1 and self.e2 == other.e2
                and self.lam == other.lam)

    def __repr__(self):
        return "<quadruple on %s, eigenvalue %s>" % (self.model.name, self.lam)


def sekiya_from_triple(triple: ContactTriple, lam=0) -> SekiyaQuadruple:
    """Shear a triple into a quadruple with the given eigenvalue."""
    model = triple.model
    lam = _scalar(model, lam)
    two = model.ctx.constant(2)
    images = []
    for gen in model.generator_sections():
        image = (triple.apply(gen)
                 + (two * lam * inner_product(gen, triple.e2)) * triple.e1
                 - (two * lam * inner_product(gen, triple.e1)) * triple.e2)
        images.append(image)
    phi = phi_from_images(model, images)
    return SekiyaQuadruple(model, phi, triple.e1, triple.e2, lam)


def triple_from_sekiya(quad: SekiyaQuadruple) -> ContactTriple:
    """Forget the eigenvalue by shearing it back out."""
    model = quad.model
    two = model.ctx.constant(2)
    images = []
    for gen in model.generator_sections():
        image = (quad.apply(gen)
                 - (two * quad.lam * inner_product(gen, quad.e2)) * quad.e1
                 + (two * quad.lam * inner_product(gen, quad.e1)) * quad.e2)
        images.append(image)
    phi = phi_from_images(model, images)
    return ContactTriple(model, phi, quad.e1, quad.e2)


class ConeComplexStructure:
    """An orthogonal square root of minus one on a cone model."""

    __slots__ = ("model", "matrix")

    def __init__(self, model, matrix, validate=True):
        if not model.is_cone:
            raise StructureError("complex structure lives on a cone model")
        self.model = model
        self.matrix = tuple(tuple(model.ctx._own(entry) for entry in row)
                            for row in matrix)
        if validate:
            self._validate()

    apply = ContactTriple.apply

    @property
    def phi(self):
        return self.matrix

    def _validate(self):
        model = self.model
        gens = model.generator_sections()
        for gen in gens:
            if self.apply(self.apply(gen)) != -gen:
                raise StructureError("square is not minus the identity")
        for x in gens:
            jx = self.apply(x)
            for y in gens:
                if inner_product(jx, self.apply(y)) != inner_product(x, y):
                    raise StructureError("pairing is not preserved")
        ContactTriple._antisymmetry_ok(self)

    def __repr__(self):
        return "<cone complex structure on %s>" % (self.model.name,)


def _constant_real(value: FunctionElement, what: str) -> Fraction:
    if not value.is_constant():
        raise StructureError("%s must be constant, got %s" % (what, value))
    number = value.constant_value()
    if number.im != 0:
        raise StructureError("%s must be real, got %s" % (what, number))
    return number.re


def sekiya_to_cone(quad: SekiyaQuadruple) -> ConeComplexStructure:
    """The cone complex structure determined by a quadruple.

    Needs 1 + lam^2 to be an exact rational square so the frame can be
    rescaled inside the coefficient field; non-square eigenvalues are
    rejected rather than approximated.
    """
    model = quad.model
    lam_value = _constant_real(quad.lam, "the eigenvalue")
    s_value = fraction_sqrt(1 + lam_value * lam_value)
    cone = model.with_cone()
    s = cone.ctx.constant(QQi.coerce(s_value))
    two_s = s + s
    lam = cone.ctx._own(quad.lam)
    dt_sec = cone.coframe_section(cone.dim - 1)
    t_sec = cone.frame_section(cone.dim - 1)
    e1_lift = cone.lift_section(quad.e1)
    e2_lift = cone.lift_section(quad.e2)
    images = []
    for a in range(cone.dim - 1):
        gen = model.frame_section(a)
        lifted = cone.lift_section(quad.apply(gen))
        images.append(lifted
                      - (two_s * cone.ctx._own(inner_product(gen, quad.e2))) * t_sec
                      - (two_s * cone.ctx._own(inner_product(gen, quad.e1))) * dt_sec)
    images.append(s * e1_lift - lam * t_sec)
    for a in range(cone.dim - 1):
        gen = model.coframe_section(a)
        lifted = cone.lift_section(quad.apply(gen))
        images.append(lifted
                      - (two_s * cone.ctx._own(inner_product(gen, quad.e2))) * t_sec
                      - (two_s * cone.ctx._own(inner_product(gen, quad.e1))) * dt_sec)
    images.append(s * e2_lift + lam * dt_sec)
    matrix = phi_from_images(cone, images)
    return ConeComplexStructure(cone, matrix)


def _base_section(cone, x: GenSection, strict: bool) -> GenSection:
    base = cone.base
    m = base.dim
    if strict and (x.vec[m] or x.form[m]):
        raise StructureError("section carries cone components")
    return GenSection(base, x.vec[:m], x.form[:m])


def cone_to_sekiya(j: ConeComplexStructure) -> SekiyaQuadruple:
    """Extract the quadruple back from a cone complex structure."""
    cone = j.model
    base = cone.base
    two = cone.ctx.constant(2)
    dt_sec = cone.coframe_section(cone.dim - 1)
    t_sec = cone.frame_section(cone.dim - 1)
    lam = two * inner_product(j.apply(dt_sec), t_sec)
    lam_value = _constant_real(lam, "the extracted eigenvalue")
    s_value = fraction_sqrt(1 + lam_value * lam_value)
    inv_s = cone.ctx.constant(QQi.coerce(1 / s_value))
    e1 = _base_section(cone, inv_s * (j.apply(t_sec) + lam * t_sec), strict=True)
    e2 = _base_section(cone, inv_s * (j.apply(dt_sec) - lam * dt_sec), strict=True)
    images = []
    for gen in base.generator_sections():
        image = j.apply(cone.lift_section(gen))
        images.append(_base_section(cone, image, strict=False))
    phi = phi_from_images(base, images)
    return SekiyaQuadruple(base, phi, e1, e2, base.ctx._own(lam))


def cone_lift(triple: ContactTriple) -> ConeComplexStructure:
    """The eigenvalue-zero cone complex structure of a triple."""
    return sekiya_to_cone(sekiya_from_triple(triple, 0))


def cone_type_bounds(pair: ContactPair, triple: ContactTriple = None):
    """Per-point comparison of the pair type with its cone lift type.

    Returns rows (t_pair, t_cone, anchor_in_image) and checks that the
    displacement stays in {0, 1} with zero exactly when the anchor image
    of the second frame section already lies in the anchor image of L.
    """
    if triple is None:
        triple = triple_from_pair(pair)
    model = pair.model
    j = cone_lift(triple)
    cone = j.model
    i_unit = _imag_unit(model)
    l_cone = [cone.lift_section(l) for l in pair.l_sections]
    l_cone.append(cone.lift_section(triple.e1)
                  + i_unit * cone.frame_section(cone.dim - 1))
    l_cone.append(cone.lift_section(triple.e2)
                  + i_unit * cone.coframe_section(cone.dim - 1))
    cone_rows = [list(x.vec) for x in l_cone]
    base_rows = [list(l.vec) for l in pair.l_sections]
    anchor_row = [list(triple.e2.vec)]
    types = geometric_type(pair)
    rows = []
    for point, (_, t_pair) in zip(model.points, types):
        t_cone = cone.dim - _rank_at(cone, cone_rows, point)
        with_anchor = _rank_at(model, base_rows + anchor_row, point)
        plain = _rank_at(model, base_rows, point)
        anchor_in = with_anchor == plain
        delta = t_pair - t_cone
        if delta not in (0, 1):
            raise StructureError("cone type displacement %d out of range" % delta)
        if (delta == 0) != anchor_in:
            raise StructureError("cone type displacement disagrees with the "
                                 "anchor membership test")
        rows.append((t_pair, t_cone, anchor_in))
    return rows


# ---------------------------------------------------------------------------
# integrability


class BranchReport:
    """Involutivity outcome for the span of L and one E-direction."""

    __slots__ = ("name", "ok", "failing_bracket", "certificates", "residuals")

    def __init__(self, name, ok, failing_bracket=None, certificates=(),
                 residuals=()):
        self.name = name
        self.ok = ok
        self.failing_bracket = failing_bracket
        self.certificates = list(certificates)
        self.residuals = list(residuals)

    def __repr__(self):
        if self.ok:
            return "<branch %s involutive>" % (self.name,)
        return "<branch %s fails at %s>" % (self.name, self.failing_bracket)


class IntegrabilityVerdict:
    """Which isotropic lines close up, with obstruction certificates."""

    def __init__(self, mode, branches):
        self.mode = mode
        self.branches = list(branches)
        oks = [b.ok for b in self.branches]
        self.ok = all(oks) if mode == "strong" else any(oks)

    @property
    def lines_tried(self):
        return [b.name for b in self.branches]

    @property
    def certificates(self):
        out = []
        for branch in self.branches:
            out.extend(branch.certificates)
        return out

    def summary(self):
        state = "holds" if self.ok else "fails"
        parts = ["%s integrability %s" % (self.mode, state),
                 "lines tried: %s" % (", ".join(self.lines_tried),)]
        for branch in self.branches:
            if not branch.ok:
                parts.append("branch %s obstructed at %s" % (branch.name,
                                                             branch.failing_bracket))
                for cert in branch.certificates:
                    parts.append("  certificate: %s" % (cert,))
        return "; ".join(parts)


def _branch_report(pair: ContactPair, name, e_line, other_e, twist) -> BranchReport:
    model = pair.model
    span = list(pair.l_sections) + [e_line]
    candidates = pair.conj_l() + [e_line.conj(), other_e]
    candidates += model.generator_sections()
    basis = _complete_basis(model, span, candidates)
    complement = basis[len(span):]
    labels = []
    for k in range(len(pair.l_sections)):
        for j in range(k + 1, len(pair.l_sections)):
            labels.append(("[l%d,l%d]" % (k + 1, j + 1),
                           pair.l_sections[k], pair.l_sections[j]))
    for k in range(len(pair.l_sections)):
        labels.append(("[l%d,%s]" % (k + 1, name), pair.l_sections[k], e_line))
    for label, x, y in labels:
        bracket = dorfman(x, y, twist=twist)
        coeffs = decompose(bracket, basis)
        tail = coeffs[len(span):]
        if any(tail):
            residuals = [(str(complement[k]), tail[k])
                         for k in range(len(tail)) if tail[k]]
            certificates = []
            for _, value in residuals:
                for part in _conj_split(model, value):
                    if part:
                        certificates.append(part)
            return BranchReport(name, False, label, certificates, residuals)
    return BranchReport(name, True)


def integrability_check(pair: ContactPair, mode: str = "strong",
                        twist=None) -> IntegrabilityVerdict:
    """Involutivity of L extended by each isotropic E-line.

    The existential quantifier runs over the two lines of the declared
    frame; the verdict records which lines were tried.  Obstructions are
    the exact coefficients, split into conjugation-even and -odd parts,
    that must vanish for the first failing bracket to stay in its span.
    """
    if mode not in ("integrable", "strong"):
        raise ValueError("unknown integrability mode %r" % (mode,))
    branches = [
        _branch_report(pair, "e1", pair.e1, pair.e2, twist),
        _branch_report(pair, "e2", pair.e2, pair.e1, twist),
    ]
    return IntegrabilityVerdict(mode, branches)


# ---------------------------------------------------------------------------
# normality


class NormalityVerdict:
    """Outcome of the three closedness conditions on a triple."""

    def __init__(self, failures, checked):
        self.failures = list(failures)
        self.checked = checked

    @property
    def is_normal(self):
        return not self.failures

    def residual_scalars(self):
        out = []
        for _, residuals in self.failures:
            out.extend(residuals)
        return out

    def summary(self):
        if self.is_normal:
            return "normal (%d identities checked)" % (self.checked,)
        parts = ["not normal"]
        for label, residuals in self.failures:
            parts.append("%s: %s" % (label, ", ".join(str(r) for r in residuals)))
        return "; ".join(parts)


def _nonzero_coordinates(section: GenSection):
    model = section.model
    names = model.frame_names + model.coframe_names
    return [(names[k], c) for k, c in enumerate(section.coordinates()) if c]


def normality_check(triple: ContactTriple, twist=None) -> NormalityVerdict:
    """Torsion, frame compatibility and frame bracket conditions.

    Condition one is the torsion of the endomorphism on the orthogonal
    complement of the frame plane; condition two asks the endomorphism
    to commute with bracketing by each frame section; condition three
    asks the frame sections to commute.  Residuals are the nonzero
    coordinates of each failing expression.
    """
    model = triple.model
    perp = eperp_frame(model, triple.e1, triple.e2)
    failures = []
    checked = 0
    images = [triple.apply(x) for x in perp]
    for a, x in enumerate(perp):
        for b, y in enumerate(perp):
            expr = (dorfman(images[a], images[b], twist=twist)
                    - dorfman(x, y, twist=twist)
                    - triple.apply(dorfman(images[a], y, twist=twist)
                                   + dorfman(x, images[b], twist=twist)))
            checked += 1
            if expr:
                failures.append(("torsion(x%d,x%d)" % (a + 1, b + 1),
                                 [c for _, c in _nonzero_coordinates(expr)]))
    for label, e in (("e1", triple.e1), ("e2", triple.e2)):
        for a, x in enumerate(perp):
            expr = (triple.apply(dorfman(x, e, twist=twist))
                    - dorfman(images[a], e, twist=twist))
            checked += 1
            if expr:
                failures.append(("frame-compat(x%d,%s)" % (a + 1, label),
                                 [c for _, c in _nonzero_coordinates(expr)]))
    expr = dorfman(triple.e1, triple.e2, twist=twist)
    checked += 1
    if expr:
        failures.append(("frame-bracket",
                         [c for _, c in _nonzero_coordinates(expr)]))
    return NormalityVerdict(failures, checked)


class NormalFrameVerdict:
    """Result of searching for an exact-form presentation of [e1, e2]."""

    def __init__(self, status, witness=None, certificate=None, reason=""):
        if status not in ("holds", "fails", "inconclusive"):
            raise ValueError("bad status %r" % (status,))
        self.status = status
        self.witness = witness
        self.certificate = certificate
        self.reason = reason

    @property
    def conclusive(self):
        return self.status != "inconclusive"

    def summary(self):
        if self.status == "holds":
            return "holds with potential %s" % (self.witness,)
        if self.status == "fails":
            return "fails: %s" % (self.reason,)
        return "inconclusive: %s" % (self.reason,)


def _default_candidates(model):
    """Zero, signed generators and signed degree-two monomials."""
    ctx = model.ctx
    out = [ctx.zero()]
    gens = [name for name in ctx.gens
            if name in ctx.assignable and name not in ctx.formal]
    for name in gens:
        g = ctx.gen(name)
        out.extend([g, -g])
    for a, name_a in enumerate(gens):
        for name_b in gens[a:]:
            m = ctx.gen(name_a) * ctx.gen(name_b)
            out.extend([m, -m])
    return out


def _frame_bracket_rhs(pair, potential_form: GenSection):
    two = pair.model.ctx.constant(2)
    return (potential_form
            - (two * inner_product(pair.e1, potential_form)) * pair.e2
            - (two * inner_product(pair.e2, potential_form)) * pair.e1)


def normal_frame_criterion(pair: ContactPair, twist=None,
                           candidates=None) -> NormalFrameVerdict:
    """Search for a potential making the frame bracket exact.

    Gate one: without strong integrability the structure cannot carry
    such a frame, so the verdict fails outright.  Gate two: if no
    1-form at all, exact or not, reproduces the frame bracket through
    the projection formula, the linear solver's refutation certificate
    settles failure.  Otherwise the candidate potentials are tried; a
    match settles success, exhaustion is reported as inconclusive.
    """
    model = pair.model
    strong = integrability_check(pair, "strong", twist=twist)
    if not strong.ok:
        return NormalFrameVerdict(
            "fails", reason="not strongly integrable; " + strong.summary())
    bracket = dorfman(pair.e1, pair.e2, twist=twist)
    columns = []
    for a in range(model.dim):
        columns.append(_frame_bracket_rhs(pair, model.coframe_section(a)))
    matrix = _basis_matrix(model, columns)
    try:
        solve_linear(model.ctx, matrix, bracket.coordinates())
    except NoSolution as failure:
        return NormalFrameVerdict(
            "fails", certificate=failure.certificate,
            reason="no 1-form reproduces the frame bracket; refutation %s"
                   % (failure.certificate,))
    if candidates is None:
        candidates = _default_candidates(model)
    for cand in candidates:
        cand = _scalar(model, cand)
        potential_form = script_d(model, cand)
        if bracket == _frame_bracket_rhs(pair, potential_form):
            return NormalFrameVerdict("holds", witness=cand)
    return NormalFrameVerdict(
        "inconclusive", reason="candidate potentials exhausted")


# ---------------------------------------------------------------------------
# mixed spinor pairs


class MixedPair:
    """Two pure spinor forms exchanged by isotropic Clifford actions.

    The forms have definite, opposite parity, pair nondegenerately
    against each other's conjugate at every sample point, and satisfy
    rho1 = e1.rho2 and rho2 = e2.rho1 for isotropic witness sections.
    An optional presentation records each form as exp(i omega) wedge a
    homogeneous factor, which the fiber-integration type accounting
    needs.
    """

    __slots__ = ("model", "rho1", "rho2", "e1", "e2", "presentation")

    def __init__(self, model, rho1, rho2, e1, e2, presentation=None,
                 validate=True):
        self.model = model
        self.rho1 = rho1
        self.rho2 = rho2
        self.e1 = e1
        self.e2 = e2
        self.presentation = presentation
        if validate:
            self._validate()

    def _validate(self):
        model = self.model
        p1, p2 = self.rho1.parity(), self.rho2.parity()
        if p1 is None or p2 is None or p1 == p2:
            raise StructureError("spinor forms need definite opposite parity")
        if inner_product(self.e1, self.e1) or inner_product(self.e2, self.e2):
            raise StructureError("witness sections must be isotropic")
        if self.e1.clifford(self.rho2) != self.rho1:
            raise StructureError("first exchange identity fails")
        if self.e2.clifford(self.rho1) != self.rho2:
            raise StructureError("second exchange identity fails")
        mu = self.rho1.mukai(self.rho2.conj())
        for point in model.points:
            if mu.evaluate_at(point).is_zero():
                raise StructureError("spinor pairing degenerates at a point")
        if self.presentation is not None:
            for rho, (omega, factor) in zip((self.rho1, self.rho2),
                                            self.presentation):
                if _exp_i_wedge(model, omega, factor) != rho:
                    raise StructureError("presentation does not rebuild the form")


def _exp_i_wedge(model, omega: DifferentialForm, factor: DifferentialForm):
    """exp(i omega) wedge factor, expanded exactly."""
    i_unit = _imag_unit(model)
    out = factor
    term = factor
    k = 0
    while True:
        k += 1
        term = (omega.wedge(term) * i_unit) * model.ctx.constant(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
    return out


def mixed_pair_from_pair(pair: ContactPair, triple: ContactTriple,
                         rho1: DifferentialForm = None,
                         presentation=None) -> MixedPair:
    """Promote a pair to spinor form, given a representative for rho1.

    There is no general polynomial representative search; shipped
    structures provide rho1 and rho2 is generated by the exchange
    identity.  Annihilators are compared with L plus each frame line at
    every sample point.
    """
    if rho1 is None:
        raise FrameSearchFailed("no spinor representative supplied")
    model = pair.model
    rho2 = triple.e2.clifford(rho1)
    mp = MixedPair(model, rho1, rho2, triple.e1, triple.e2,
                   presentation=presentation)
    for rho, e_line in ((rho1, triple.e1), (rho2, triple.e2)):
        span = [l for l in pair.l_sections] + [e_line]
        span_rows = _coordinate_rows(span)
        for point in model.points:
            kernel = clifford_kernel_at(rho, point)
            if len(kernel) != model.dim:
                raise StructureError("spinor form is not pure at a point")
            res, rows = _evaluated_matrix(model, span_rows, point)
            combined = rows + [list(v) for v in kernel]
            if matrix_rank(res, combined) != model.dim:
                raise StructureError(
                    "annihilator disagrees with the span at a point")
    return mp


class SpinorSolveReport:
    """Witness section, or a refutation, for one spinor derivative."""

    __slots__ = ("index", "solvable", "witness", "certificate")

    def __init__(self, index, solvable, witness=None, certificate=None):
        self.index = index
        self.solvable = solvable
        self.witness = witness
        self.certificate = certificate


class MixedIntegrabilityVerdict:
    def __init__(self, mode, reports):
        self.mode = mode
        self.reports = list(reports)
        oks = [r.solvable for r in self.reports]
        self.ok = all(oks) if mode == "strong" else any(oks)

    def summary(self):
        state = "holds" if self.ok else "fails"
        parts = ["%s spinor integrability %s" % (self.mode, state)]
        for report in self.reports:
            if report.solvable:
                parts.append("rho%d witness: %s" % (report.index, report.witness))
            else:
                parts.append("rho%d unsolvable: %s" % (report.index,
                                                       report.certificate))
        return "; ".join(parts)


def _solve_clifford(model, rho: DifferentialForm, rhs: DifferentialForm):
    """Solve v.rho = rhs for a section v by exact coefficient matching."""
    columns = [gen.clifford(rho) for gen in model.generator_sections()]
    monomials = set(rhs.terms)
    for col in columns:
        monomials.update(col.terms)
    keys = sorted(monomials, key=lambda idx: (len(idx), idx))
    zero = model.ctx.zero()
    matrix = [[col.terms.get(idx, zero) for col in columns] for idx in keys]
    rhs_vec = [rhs.terms.get(idx, zero) for idx in keys]
    sol = solve_linear(model.ctx, matrix, rhs_vec)
    coeffs = sol.as_elements()
    m = model.dim
    return GenSection(model, coeffs[:m], coeffs[m:])


def mixed_pair_integrability(mp: MixedPair, mode: str = "strong",
                             twist=None) -> MixedIntegrabilityVerdict:
    """Solvability of the twisted derivative equations d rho = v.rho."""
    if mode not in ("integrable", "strong"):
        raise ValueError("unknown integrability mode %r" % (mode,))
    model = mp.model
    reports = []
    for index, rho in ((1, mp.rho1), (2, mp.rho2)):
        rhs = rho.exterior_d(twist)
        try:
            witness = _solve_clifford(model, rho, rhs)
        except NoSolution as failure:
            reports.append(SpinorSolveReport(index, False,
                                             certificate=failure.certificate))
            continue
        if witness.clifford(rho) != rhs:
            raise AssertionError("spinor witness verification failed")
        reports.append(SpinorSolveReport(index, True, witness=witness))
    return MixedIntegrabilityVerdict(mode, reports)


def cone_spinor(mp: MixedPair) -> DifferentialForm:
    """The cone form rho1 + i dt rho2, with purity checked pointwise."""
    model = mp.model
    cone = model.with_cone()
    i_unit = _imag_unit(model)
    dt_form = DifferentialForm.coframe(cone, cone.dim - 1)
    rho = cone.lift_form(mp.rho1) + dt_form.wedge(cone.lift_form(mp.rho2)) * i_unit
    witnesses = (
        cone.coframe_section(cone.dim - 1) - i_unit * cone.lift_section(mp.e1),
        cone.frame_section(cone.dim - 1) - i_unit * cone.lift_section(mp.e2),
    )
    for witness in witnesses:
        if witness.clifford(rho):
            raise StructureError("expected annihilator section fails on the cone")
    self_pairing = rho.mukai(rho.conj())
    for point in cone.points:
        if not is_pure_at(rho, point):
            raise StructureError("cone spinor is not pure at a point")
        if self_pairing.evaluate_at(point).is_zero():
            raise StructureError("cone spinor self-pairing vanishes at a point")
    return rho


def type_sum_check(mp: MixedPair, pair: ContactPair):
    """Per-point table asserting 2t = type(rho1) + type(rho2) + 1."""
    model = mp.model
    types = geometric_type(pair)
    rows = []
    for point, (_, t) in zip(model.points, types):
        t1 = mp.rho1.type_at(point)
        t2 = mp.rho2.type_at(point)
        if 2 * t != t1 + t2 + 1:
            raise StructureError(
                "type balance fails at a point: 2*%d != %d + %d + 1"
                % (t, t1, t2))
        rows.append((t, t1, t2))
    return rows


def builtin_example(name, **params):
    """Build a named example structure; see the builders module."""
    from .builders import build_example
    return build_example(name, **params)
