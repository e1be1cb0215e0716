"""Frame presentations of manifolds and their generalized tangent bundles.

A ``FrameModel`` declares a global frame X_1..X_m with its dual coframe,
a Lie structure table, a coframe differential table, and derivation
bindings into the scalar context.  The two tables are independent input
and the loader cross-validates them, so a model that ships inconsistent
orientation conventions is rejected instead of silently producing wrong
brackets.

Sections of TM + T*M (and of the cone extension, which adds one more
frame/coframe direction for the scaling data) are ``GenSection`` values.
All brackets reduce to one Dorfman computation driven by the Cartan
formula; the cone variants differ only by explicitly pinned extra terms.
"""

from __future__ import annotations

import itertools

from .ring import QQi, ContextMismatch, SecondOrderDerivativeRequired, tokenize, ParseError
from .forms import DifferentialForm, parse_form


class ModelValidationError(ValueError):
    """A model's declared tables are mutually inconsistent."""


class LoadReport:
    """What the loader verified and what it had to skip, with reasons."""

    def __init__(self):
        self.performed = []
        self.skipped = []

    def done(self, label):
        self.performed.append(label)

    def skip(self, label, reason):
        self.skipped.append((label, reason))

    def __str__(self):
        lines = ["checked: %s" % ", ".join(self.performed)]
        for label, reason in self.skipped:
            lines.append("skipped %s (%s)" % (label, reason))
        return "\n".join(lines)


class FrameModel:
    """Exterior-calculus backend for one frame presentation.

    Also serves as the coefficient space object for ``DifferentialForm``:
    it exposes ``ctx``, ``dim``, ``coframe_names``, ``derivation_for`` and
    ``d_coframe``.
    """

    def __init__(self, name, ctx, frame_names, coframe_names, structure,
                 d_coframe_table, derivation_names, points,
                 is_cone=False, base=None, validate=True):
        self.name = name
        self.ctx = ctx
        self.frame_names = tuple(frame_names)
        self.coframe_names = tuple(coframe_names)
        self.dim = len(self.frame_names)
        if len(self.coframe_names) != self.dim:
            raise ModelValidationError("frame and coframe sizes differ")
        self.frame_index = {n: a for a, n in enumerate(self.frame_names)}
        self.coframe_index = {n: a for a, n in enumerate(self.coframe_names)}
        # structure[a][b] = coefficient list of [X_a, X_b] in the frame
        self.structure = tuple(tuple(tuple(row) for row in block)
                               for block in structure)
        self.derivation_names = tuple(derivation_names)
        self.d_coframe_table = tuple(
            DifferentialForm.zero(self) if df is None else df
            for df in d_coframe_table)
        self.points = tuple(dict(p) for p in points)
        self.is_cone = is_cone
        self.base = base
        self._cone_cache = {}
        self.load_report = LoadReport()
        if validate:
            self._validate()

    # -- space protocol for DifferentialForm ----------------------------

    def derivation_for(self, a):
        return self.derivation_names[a]

    def d_coframe(self, a):
        return self.d_coframe_table[a]

    # -- section construction -------------------------------------------

    def zero_section(self) -> "GenSection":
        z = self.ctx.zero()
        return GenSection(self, [z] * self.dim, [z] * self.dim)

    def frame_section(self, a) -> "GenSection":
        if isinstance(a, str):
            a = self.frame_index[a]
        vec = [self.ctx.zero()] * self.dim
        vec[a] = self.ctx.one()
        return GenSection(self, vec, [self.ctx.zero()] * self.dim)

    def coframe_section(self, a) -> "GenSection":
        if isinstance(a, str):
            a = self.coframe_index[a]
        form = [self.ctx.zero()] * self.dim
        form[a] = self.ctx.one()
        return GenSection(self, [self.ctx.zero()] * self.dim, form)

    def generator_sections(self):
        """Frame sections followed by coframe sections, canonical order."""
        out = [self.frame_section(a) for a in range(self.dim)]
        out.extend(self.coframe_section(a) for a in range(self.dim))
        return out

    def section(self, text: str) -> "GenSection":
        return parse_section(self, text)

    def form(self, text: str) -> DifferentialForm:
        return parse_form(self, text)

    def scalar(self, text):
        return self.ctx.parse(text) if isinstance(text, str) else self.ctx._own(text)

    # -- forms shortcuts -------------------------------------------------

    def zero_form(self) -> DifferentialForm:
        return DifferentialForm.zero(self)

    def d_scalar(self, h) -> DifferentialForm:
        return DifferentialForm.from_scalar(self, h).exterior_d()

    def lift_form(self, form: DifferentialForm) -> DifferentialForm:
        """Reinterpret a base-model form on this model (index-compatible)."""
        if form.space is self:
            return form
        source = form.space
        for a, name in enumerate(source.coframe_names):
            if self.coframe_names[a] != name:
                raise ValueError("coframe mismatch while lifting a form")
        return DifferentialForm(self, dict(form.terms))

    def lift_section(self, x: "GenSection") -> "GenSection":
        if x.model is self:
            return x
        pad = self.dim - x.model.dim
        if pad < 0 or x.model.frame_names != self.frame_names[:x.model.dim]:
            raise ValueError("section does not embed in this model")
        z = self.ctx.zero()
        return GenSection(self, list(x.vec) + [z] * pad, list(x.form) + [z] * pad)

    # -- cone ------------------------------------------------------------

    def with_cone(self, vector_name="Dt", form_name="dt") -> "FrameModel":
        """The invariant-section cone extension: one extra direction.

        The new direction commutes with everything, its coframe element is
        closed, and coefficients are constant along it (no derivation).
        """
        if self.is_cone:
            raise ValueError("model already carries a cone direction")
        key = (vector_name, form_name)
        cached = self._cone_cache.get(key)
        if cached is not None:
            return cached
        m = self.dim
        zero = self.ctx.zero()
        structure = [[list(self.structure[a][b]) + [zero] for b in range(m)]
                     for a in range(m)]
        for a in range(m):
            structure[a].append([zero] * (m + 1))
        structure.append([[zero] * (m + 1) for _ in range(m + 1)])
        cone = FrameModel(
            self.name + "+cone",
            self.ctx,
            self.frame_names + (vector_name,),
            self.coframe_names + (form_name,),
            structure,
            tuple(self.d_coframe_table) + (None,),
            self.derivation_names + (None,),
            self.points,
            is_cone=True,
            base=self,
            validate=False)
        # base d-forms must be re-spaced onto the cone model
        cone.d_coframe_table = tuple(
            [cone.lift_form(df) for df in self.d_coframe_table]
            + [DifferentialForm.zero(cone)])
        self._cone_cache[key] = cone
        return cone

    # -- load-time validation -------------------------------------------

    def _structure_ok(self):
        m = self.dim
        for a in range(m):
            for e in range(m):
                if self.structure[a][a][e]:
                    raise ModelValidationError(
                        "[%s,%s] must vanish"
                        % (self.frame_names[a], self.frame_names[a]))
        for a in range(m):
            for b in range(m):
                for e in range(m):
                    if self.structure[a][b][e] != -self.structure[b][a][e]:
                        raise ModelValidationError(
                            "structure table is not antisymmetric at (%s,%s)"
                            % (self.frame_names[a], self.frame_names[b]))
        self.load_report.done("structure-antisymmetry")

    def _cartan_ok(self):
        """dalpha^e(X_a, X_b) must equal -c_ab^e, table against table."""
        m = self.dim
        for e in range(m):
            expected = {}
            for a in range(m):
                for b in range(a + 1, m):
                    c = self.structure[a][b][e]
                    if c:
                        expected[(a, b)] = -c
            declared = self.d_coframe_table[e]
            if declared is None:
                declared = DifferentialForm.zero(self)
            got = {}
            for idx, coeff in declared.terms.items():
                if len(idx) != 2:
                    raise ModelValidationError(
                        "d%s is not a 2-form" % self.coframe_names[e])
                got[idx] = coeff
            if got != expected:
                raise ModelValidationError(
                    "coframe differential of %s disagrees with the "
                    "structure table" % self.coframe_names[e])
        self.load_report.done("coframe-differential-compatibility")

    def _derive(self, direction, element):
        name = self.derivation_names[direction]
        if name is None:
            return self.ctx.zero()
        return element.derive(name)

    def _jacobi_ok(self):
        m = self.dim
        for a in range(m):
            for b in range(a + 1, m):
                for c in range(b + 1, m):
                    try:
                        residual = [self.ctx.zero()] * m
                        for (p, q, r) in ((a, b, c), (b, c, a), (c, a, b)):
                            for e in range(m):
                                coeff = self.structure[p][q][e]
                                if coeff:
                                    for f in range(m):
                                        residual[f] = residual[f] + \
                                            coeff * self.structure[e][r][f]
                                residual[e] = residual[e] - \
                                    self._derive(r, self.structure[p][q][e])
                        if any(residual):
                            raise ModelValidationError(
                                "Jacobi identity fails on (%s,%s,%s)"
                                % (self.frame_names[a], self.frame_names[b],
                                   self.frame_names[c]))
                    except SecondOrderDerivativeRequired as exc:
                        self.load_report.skip(
                            "jacobi(%d,%d,%d)" % (a, b, c),
                            "needs derivative of %s" % exc.generator)
        self.load_report.done("jacobi")

    def _commutation_ok(self):
        """[D_a, D_b] = sum_e c_ab^e D_e on every context generator."""
        m = self.dim
        for a in range(m):
            for b in range(a + 1, m):
                if self.derivation_names[a] is None or self.derivation_names[b] is None:
                    continue
                for gen_name in self.ctx.gens:
                    if gen_name in self.ctx.constants:
                        continue
                    gen = self.ctx.gen(gen_name)
                    try:
                        lhs = self._derive(a, self._derive(b, gen)) \
                            - self._derive(b, self._derive(a, gen))
                        rhs = self.ctx.zero()
                        for e in range(m):
                            coeff = self.structure[a][b][e]
                            if coeff:
                                rhs = rhs + coeff * self._derive(e, gen)
                        if lhs != rhs:
                            raise ModelValidationError(
                                "derivations of %s and %s do not commute per "
                                "the structure table on %s"
                                % (self.frame_names[a], self.frame_names[b],
                                   gen_name))
                    except SecondOrderDerivativeRequired as exc:
                        self.load_report.skip(
                            "commutation(%s,%s;%s)"
                            % (self.frame_names[a], self.frame_names[b], gen_name),
                            "needs derivative of %s" % exc.generator)
        self.load_report.done("derivation-commutation")

    def _relations_preserved(self):
        for pos, (power, tail) in sorted(self.ctx.relations.items()):
            lead = self.ctx.gens[pos]
            if lead in self.ctx.constants:
                continue
            gen = self.ctx.gen(lead)
            tail_el = self.ctx.element(dict(tail))
            for a in range(self.dim):
                if self.derivation_names[a] is None:
                    continue
                try:
                    lhs = (gen ** (power - 1)) * self._derive(a, gen) * power
                    rhs = self._derive(a, tail_el)
                    if lhs != rhs:
                        raise ModelValidationError(
                            "derivation along %s does not preserve the "
                            "relation for %s" % (self.frame_names[a], lead))
                except SecondOrderDerivativeRequired as exc:
                    self.load_report.skip(
                        "relation-preservation(%s,%s)" % (self.frame_names[a], lead),
                        "needs derivative of %s" % exc.generator)
        self.load_report.done("relation-preservation")

    def _points_ok(self):
        for point in self.points:
            self.ctx.check_point(point)
            for pos, (power, tail) in sorted(self.ctx.relations.items()):
                lead = self.ctx.gens[pos]
                if lead in self.ctx.constants:
                    continue
                # evaluate the lead first: powering the generator would be
                # rewritten by the relation itself and the check would
                # compare both sides of a tautology
                lhs = self.ctx.gen(lead).evaluate(point) ** power
                rhs = self.ctx.element(dict(tail)).evaluate(point)
                if lhs != rhs:
                    raise ModelValidationError(
                        "sample point %r violates the relation for %s"
                        % (point, lead))
        if self.ctx.formal:
            if not self.points:
                self.load_report.skip("sample-points", "formal context")
        elif len(self.points) < 3:
            raise ModelValidationError("a model needs at least 3 sample points")
        self.load_report.done("sample-points")

    def _validate(self):
        m = self.dim
        if len(self.structure) != m or any(len(b) != m for b in self.structure):
            raise ModelValidationError("structure table has the wrong shape")
        for block in self.structure:
            for row in block:
                if len(row) != m:
                    raise ModelValidationError("structure row has the wrong width")
        if len(self.d_coframe_table) != m or len(self.derivation_names) != m:
            raise ModelValidationError("table lengths disagree with the dimension")
        self._structure_ok()
        self._cartan_ok()
        self._jacobi_ok()
        self._commutation_ok()
        self._relations_preserved()
        self._points_ok()

    def __repr__(self):
        return "<model %s dim=%d>" % (self.name, self.dim)


class GenSection:
    """A generalized section: vector plus one-form coefficients."""

    __slots__ = ("model", "vec", "form")

    def __init__(self, model, vec, form):
        if len(vec) != model.dim or len(form) != model.dim:
            raise ValueError("coefficient lists must match the model dimension")
        self.model = model
        self.vec = tuple(model.ctx._own(v) for v in vec)
        self.form = tuple(model.ctx._own(w) for w in form)

    def _coerce(self, other) -> "GenSection":
        if not isinstance(other, GenSection):
            raise TypeError("expected a section")
        if other.model is not self.model:
            raise ContextMismatch("sections live on different models")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return GenSection(self.model,
                          [a + b for a, b in zip(self.vec, other.vec)],
                          [a + b for a, b in zip(self.form, other.form)])

    def __sub__(self, other):
        other = self._coerce(other)
        return GenSection(self.model,
                          [a - b for a, b in zip(self.vec, other.vec)],
                          [a - b for a, b in zip(self.form, other.form)])

    def __neg__(self):
        return GenSection(self.model, [-a for a in self.vec], [-a for a in self.form])

    def __mul__(self, scalar):
        scalar = self.model.ctx._own(scalar)
        return GenSection(self.model,
                          [a * scalar for a in self.vec],
                          [a * scalar for a in self.form])

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ContextMismatch):
            return NotImplemented
        return self.vec == other.vec and self.form == other.form

    def __hash__(self):
        return hash((id(self.model), tuple(v.sort_signature() for v in self.vec),
                     tuple(w.sort_signature() for w in self.form)))

    def is_zero(self) -> bool:
        return not (any(self.vec) or any(self.form))

    def __bool__(self):
        return not self.is_zero()

    def conj(self) -> "GenSection":
        return GenSection(self.model, [v.conj() for v in self.vec],
                          [w.conj() for w in self.form])

    def one_form(self) -> DifferentialForm:
        return DifferentialForm(self.model,
                                {(a,): c for a, c in enumerate(self.form) if c})

    def vector_only(self) -> bool:
        return not any(self.form)

    def form_only(self) -> bool:
        return not any(self.vec)

    def coordinates(self):
        """Flat coefficient vector: frame coefficients then coframe ones."""
        return list(self.vec) + list(self.form)

    def evaluate_at(self, point):
        return ([v.evaluate(point) for v in self.vec],
                [w.evaluate(point) for w in self.form])

    def anchor_apply(self, h):
        """The underlying vector field acting on a scalar."""
        out = self.model.ctx.zero()
        for a, coeff in enumerate(self.vec):
            if not coeff:
                continue
            name = self.model.derivation_names[a]
            if name is None:
                continue
            out = out + coeff * h.derive(name)
        return out

    def clifford(self, r: DifferentialForm) -> DifferentialForm:
        if r.space is not self.model:
            raise ContextMismatch("form lives on a different model")
        return r.clifford(self.vec, self.form)

    def __str__(self):
        one = self.model.ctx.one()
        pieces = []
        names = self.model.frame_names + self.model.coframe_names
        for name, coeff in zip(names, self.coordinates()):
            if not coeff:
                continue
            if coeff == one:
                body = name
            elif coeff == -one:
                body = "-" + name
            elif coeff.is_constant() and len(str(coeff)) <= 6 and not str(coeff).startswith("-"):
                body = "%s*%s" % (coeff, name)
            else:
                body = "(%s)*%s" % (coeff, name)
            if pieces and not body.startswith("-"):
                pieces.append("+ " + body)
            elif pieces:
                pieces.append("- " + body[1:])
            else:
                pieces.append(body)
        return " ".join(pieces) if pieces else "0"

    def __repr__(self):
        return "<section %s>" % (self,)


class TwistClass:
    """A closed twisting 3-form."""

    def __init__(self, model, form):
        if isinstance(form, str):
            form = model.form(form)
        if form.space is not model:
            form = model.lift_form(form)
        degrees = form.degrees()
        if degrees and degrees != [3]:
            raise ValueError("a twist must be homogeneous of degree 3")
        if form.exterior_d():
            raise ValueError("twist form is not closed")
        self.model = model
        self.form = form

    def __str__(self):
        return str(self.form)


def inner_product(x: GenSection, y: GenSection):
    """Half the mutual evaluation of the form and vector parts."""
    if x.model is not y.model:
        raise ContextMismatch("sections live on different models")
    out = x.model.ctx.zero()
    for a in range(x.model.dim):
        out = out + x.form[a] * y.vec[a] + y.form[a] * x.vec[a]
    return out / 2


def _lie_vector_part(x: GenSection, y: GenSection):
    model = x.model
    m = model.dim
    out = [model.ctx.zero()] * m
    for a in range(m):
        xa = x.vec[a]
        ya = y.vec[a]
        if xa:
            for b in range(m):
                yb = y.vec[b]
                if yb:
                    row = model.structure[a][b]
                    prod = xa * yb
                    for e in range(m):
                        if row[e]:
                            out[e] = out[e] + prod * row[e]
        for e in range(m):
            if xa:
                d = model._derive(a, y.vec[e])
                if d:
                    out[e] = out[e] + xa * d
            if ya:
                d = model._derive(a, x.vec[e])
                if d:
                    out[e] = out[e] - ya * d
    return out


def dorfman(x: GenSection, y: GenSection, twist: TwistClass | None = None,
            variant: str = "0") -> GenSection:
    """The non-skew bracket; optional twist; cone variants "0" and "1".

    Vector parts combine through the structure table and derivations; the
    form part is the Cartan-formula expression, with the twist adding the
    double contraction of the 3-form by the two anchors.
    """
    model = x.model
    if y.model is not model:
        raise ContextMismatch("sections live on different models")
    if variant not in ("0", "1"):
        raise ValueError("unknown bracket variant %r" % (variant,))
    if variant == "1" and not model.is_cone:
        raise ValueError("bracket variant 1 needs the cone direction")

    vec = _lie_vector_part(x, y)

    alpha = x.one_form()
    beta = y.one_form()
    d_beta = beta.exterior_d()
    scalar = beta.interior(x.vec)
    lie = d_beta.interior(x.vec) + scalar.exterior_d()
    out_form = lie + (-(alpha.exterior_d().interior(y.vec)))
    if twist is not None and twist.form:
        h = twist.form
        if h.space is not model:
            h = model.lift_form(h)
        out_form = out_form - h.interior(y.vec).interior(x.vec)

    form = [model.ctx.zero()] * model.dim
    for idx, coeff in out_form.terms.items():
        if len(idx) != 1:
            raise AssertionError("bracket form part must be a one-form")
        form[idx[0]] = form[idx[0]] + coeff

    if variant == "1":
        t = model.dim - 1
        f1, f2 = x.vec[t], y.vec[t]
        g2 = y.form[t]
        for a in range(t):
            form[a] = form[a] + f1 * y.form[a] - f2 * x.form[a]
        w1_of_v2 = model.ctx.zero()
        for a in range(t):
            w1_of_v2 = w1_of_v2 + x.form[a] * y.vec[a]
        form[t] = form[t] + f1 * g2 + w1_of_v2
    return GenSection(model, vec, form)


def script_d(model: FrameModel, h, variant: str = "0") -> GenSection:
    """The pairing-dual of the anchor on a scalar: a pure-form section."""
    h = model.ctx._own(h)
    dh = DifferentialForm.from_scalar(model, h).exterior_d()
    form = [model.ctx.zero()] * model.dim
    for idx, coeff in dh.terms.items():
        form[idx[0]] = coeff
    if variant == "1":
        if not model.is_cone:
            raise ValueError("bracket variant 1 needs the cone direction")
        form[model.dim - 1] = form[model.dim - 1] + h
    return GenSection(model, [model.ctx.zero()] * model.dim, form)


def b_transform(omega: DifferentialForm, x: GenSection) -> GenSection:
    """Gauge shift by a 2-form: the form part gains the contraction."""
    if omega.space is not x.model:
        omega = x.model.lift_form(omega)
    shifted = omega.interior(x.vec)
    form = list(x.form)
    for idx, coeff in shifted.terms.items():
        if len(idx) != 1:
            raise ValueError("gauge form must have degree 2")
        form[idx[0]] = form[idx[0]] + coeff
    return GenSection(x.model, list(x.vec), form)


class CourantReport:
    """Residuals of the three bracket axioms over a section list."""

    def __init__(self, model, variant):
        self.model = model
        self.variant = variant
        self.checked = 0
        self.failures = []
        self.skipped = []

    @property
    def ok(self):
        return not self.failures and not self.skipped

    def add_failure(self, axiom, indices, residual):
        self.failures.append((axiom, indices, residual))

    def summary(self):
        lines = ["axioms on %s: %d checks, %d failures, %d skipped"
                 % (self.model.name, self.checked, len(self.failures),
                    len(self.skipped))]
        for axiom, indices, residual in self.failures:
            lines.append("  axiom %s at %r: %s" % (axiom, indices, residual))
        return "\n".join(lines)


def courant_axioms_check(model: FrameModel, sections, twist=None,
                         variant: str = "0") -> CourantReport:
    """Verify the bracket axioms on all ordered triples from a list.

    Axioms: the left Leibniz identity of the bracket, compatibility of
    the anchor with the pairing, and the bracket of a section with itself
    being the pairing-dual differential of its self-pairing.
    """
    if len(sections) < 3:
        raise ValueError("need at least three sections")
    report = CourantReport(model, variant)

    def bracket(u, v):
        return dorfman(u, v, twist=twist, variant=variant)

    cache = {}

    def cached_bracket(i, j):
        key = (i, j)
        if key not in cache:
            cache[key] = bracket(sections[i], sections[j])
        return cache[key]

    n = len(sections)
    try:
        for i in range(n):
            x = sections[i]
            selfpair = inner_product(x, x)
            residual = bracket(x, x) - script_d(model, selfpair, variant=variant)
            report.checked += 1
            if residual:
                report.add_failure("self-bracket", (i,), str(residual))
        for i, j, k in itertools.product(range(n), repeat=3):
            x, y, z = sections[i], sections[j], sections[k]
            lhs = bracket(x, cached_bracket(j, k))
            rhs = bracket(cached_bracket(i, j), z) + bracket(y, cached_bracket(i, k))
            residual = lhs - rhs
            report.checked += 1
            if residual:
                report.add_failure("leibniz", (i, j, k), str(residual))
            pair_rhs = inner_product(cached_bracket(i, j), z) \
                + inner_product(y, cached_bracket(i, k))
            pair_residual = x.anchor_apply(inner_product(y, z)) - pair_rhs
            report.checked += 1
            if pair_residual:
                report.add_failure("anchor-pairing", (i, j, k), str(pair_residual))
    except SecondOrderDerivativeRequired as exc:
        report.skipped.append("derivative depth: %s" % exc)
    return report


class _SectionParser:
    """Linear combinations of frame/coframe names with scalar coefficients."""

    def __init__(self, model, tokens):
        self.model = model
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
        if not isinstance(value, GenSection):
            raise ParseError("expression is a scalar, not a section")
        return value

    def sum(self):
        if self.peek() == "-":
            self.take()
            value = self._neg(self.product())
        else:
            if self.peek() == "+":
                self.take()
            value = self.product()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.product()
            rhs = self._neg(rhs) if op == "-" else rhs
            value = self._add(value, rhs)
        return value

    def _neg(self, v):
        return -v

    def _add(self, a, b):
        if isinstance(a, GenSection) != isinstance(b, GenSection):
            raise ParseError("cannot add a scalar to a section")
        return a + b

    def product(self):
        value = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            if op == "/":
                if isinstance(rhs, GenSection):
                    raise ParseError("cannot divide by a section")
                value = value * (self.model.ctx.one() / rhs.constant_value())
            else:
                value = self._mul(value, rhs)
        return value

    def _mul(self, a, b):
        if isinstance(a, GenSection) and isinstance(b, GenSection):
            raise ParseError("sections do not multiply")
        if isinstance(b, GenSection):
            return b * a
        return a * b

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if tok is None or not tok.isdigit():
                raise ParseError("exponent must be a literal integer")
            if isinstance(base, GenSection):
                raise ParseError("sections do not exponentiate")
            base = base ** int(tok)
        return base

    def atom(self):
        tok = self.take()
        if tok is None:
            raise ParseError("unexpected end of section expression")
        if tok == "(":
            value = self.sum()
            self.expect(")")
            return value
        if tok == "-":
            return -self.atom()
        if tok.isdigit():
            return self.model.ctx.constant(int(tok))
        if tok == "i":
            return self.model.ctx.constant(QQi(0, 1))
        if tok in self.model.frame_index:
            return self.model.frame_section(tok)
        if tok in self.model.coframe_index:
            return self.model.coframe_section(tok)
        if tok in self.model.ctx.gen_index:
            return self.model.ctx.gen(tok)
        raise ParseError("unknown name %r in section expression" % (tok,))

    def sum_allow_scalar(self):
        return self.sum()


def parse_section(model: FrameModel, text: str) -> GenSection:
    return _SectionParser(model, tokenize(text)).parse()
