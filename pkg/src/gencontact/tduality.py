"""Circle dualization of frame models and the structures living on them.

A ``TDualPair`` fixes one frame direction of a source model as the
dualization fiber, names a replacement direction, and builds two new
models: the doubled model carrying both directions at once, and the dual
model in which the old fiber has been traded for the new one.  A
two-form ``F`` proportional to the wedge of the two fiber coframes lives
on the doubled model; construction verifies that ``sign * F``
differentiates to the difference of the two twist forms, so a pair that
does not satisfy the exchange relation is rejected outright.

Two transport maps come with the pair, both exact:

* ``phi`` swaps the fiber frame/coframe components of a section, scaled
  by the duality coefficient, and fixes everything else;
* ``tau`` wedges a form with ``exp(F)`` on the doubled model and reads
  off the coefficient of the old fiber coframe.

``phi`` preserves the pairing and intertwines brackets on sections
invariant along the fiber; ``tau`` intertwines the Clifford action up to
one global sign.  ``dualize_structure`` pushes a whole isotropic-pair
structure (frames, endomorphism, spinor pair) through these maps;
``type_change_report`` tabulates how pointwise types move and checks the
displacement rules; ``double_duality_check`` runs the dualization twice
and compares against the fiber reflection of the input.

Coefficients of everything dualized must be constant along the fiber;
``phi`` and ``tau`` enforce this and refuse otherwise.
"""

from __future__ import annotations

from fractions import Fraction

from .ring import QQi, SecondOrderDerivativeRequired
from .forms import DifferentialForm
from .frame import FrameModel, GenSection, TwistClass, dorfman, inner_product
from .contact import (
    ContactPair,
    MixedPair,
    StructureError,
    geometric_type,
    triple_from_pair,
)
from .builders import ExampleStructure, build_example


def _sorted_with_sign(values):
    """Stable insertion sort returning the permutation parity."""
    vals = list(values)
    sign = 1
    for i in range(1, len(vals)):
        j = i
        while j > 0 and vals[j - 1] > vals[j]:
            vals[j - 1], vals[j] = vals[j], vals[j - 1]
            sign = -sign
            j -= 1
    return tuple(vals), sign


def _remap_terms(terms, position_map):
    """Push form terms through an index relabeling, tracking signs."""
    out = {}
    for idx, coeff in terms.items():
        mapped = [position_map[t] for t in idx]
        if len(set(mapped)) != len(mapped):
            raise StructureError("index relabeling collapses a monomial")
        sidx, sgn = _sorted_with_sign(mapped)
        if sgn < 0:
            coeff = -coeff
        prev = out.get(sidx)
        out[sidx] = coeff if prev is None else prev + coeff
    return {idx: c for idx, c in out.items() if c}


def _tables_match(built, target):
    """Structural equality of two models sharing one scalar context."""
    if built.ctx is not target.ctx:
        return False, "scalar contexts differ"
    if built.frame_names != target.frame_names:
        return False, "frame names differ"
    if built.coframe_names != target.coframe_names:
        return False, "coframe names differ"
    if built.derivation_names != target.derivation_names:
        return False, "derivation bindings differ"
    m = built.dim
    for a in range(m):
        for b in range(m):
            for e in range(m):
                if built.structure[a][b][e] != target.structure[a][b][e]:
                    return False, ("structure tables differ at [%s,%s]"
                                   % (built.frame_names[a], built.frame_names[b]))
    for e in range(m):
        if built.d_coframe_table[e].terms != target.d_coframe_table[e].terms:
            return False, ("coframe differentials differ at %s"
                           % built.coframe_names[e])
    if built.points != target.points:
        return False, "sample points differ"
    return True, ""


class TDualPair:
    """One circle direction of a model traded for a fresh one.

    ``fiber`` names the (frame, coframe) pair being dualized away,
    ``dual_fiber`` the replacement names.  ``coefficient`` is the exact
    scale of the exchange two-form, ``sign`` the orientation with which
    it enters the twist-difference relation.  ``dual_curvature`` feeds
    the differential of the new coframe direction; it defaults to zero
    and must be a basic two-form.  Passing ``dual_model`` makes the pair
    adopt that instance after verifying it equals the model it would
    have built, so round trips can land on the original object.
    """

    def __init__(self, source_model, fiber, dual_fiber, coefficient,
                 sign=-1, twist=None, dual_twist=None, dual_curvature=None,
                 dual_model=None, name=None):
        self.source = source_model
        fiber_v, fiber_c = fiber
        q = source_model.frame_index.get(fiber_v)
        if q is None or source_model.coframe_index.get(fiber_c) != q:
            raise StructureError(
                "fiber names must be a matching frame/coframe pair, got %r"
                % (fiber,))
        self.fiber_index = q
        self.fiber_names = (fiber_v, fiber_c)
        dual_v, dual_c = dual_fiber
        if dual_v in source_model.frame_index \
                or dual_c in source_model.coframe_index:
            raise StructureError("dual fiber names collide with the source frame")
        self.dual_fiber_names = (dual_v, dual_c)
        if isinstance(coefficient, float):
            raise StructureError(
                "duality coefficient must be an exact rational, not a float")
        coefficient = Fraction(coefficient)
        if not coefficient:
            raise StructureError("duality coefficient must be nonzero")
        self.coefficient = coefficient
        if sign not in (1, -1):
            raise StructureError("sign must be +1 or -1")
        self.sign = sign
        self.name = name if name is not None else "dualize-" + fiber_v
        ctx = source_model.ctx
        self._minus_a = ctx.constant(-coefficient)
        self._minus_inv_a = ctx.constant(Fraction(-1) / coefficient)
        self._curvature_terms = self._own_curvature(dual_curvature)
        self.twist = self._as_twist(source_model, twist)
        self.correspondence = self._build_correspondence()
        self.F = DifferentialForm(
            self.correspondence,
            {(q, source_model.dim): ctx.constant(coefficient)})
        built = self._build_dual()
        if dual_model is not None:
            ok, why = _tables_match(built, dual_model)
            if not ok:
                raise StructureError(
                    "provided dual model disagrees with the built one: " + why)
            self.dual_model = dual_model
        else:
            self.dual_model = built
        self.dual_twist = self._as_twist(self.dual_model, dual_twist)
        self._check_exchange_relation()

    def __repr__(self):
        return "<duality %s: %s | %s -> %s>" % (
            self.name, self.source.name,
            self.fiber_names[0], self.dual_fiber_names[0])

    # -- construction helpers -------------------------------------------

    def _own_curvature(self, value):
        ctx = self.source.ctx
        if value is None:
            return {}
        if isinstance(value, DifferentialForm):
            value = value.terms
        terms = {}
        for idx, coeff in value.items():
            idx = tuple(idx)
            if len(idx) != 2 or idx[0] >= idx[1]:
                raise StructureError("curvature terms must be ascending pairs")
            if self.fiber_index in idx or max(idx) >= self.source.dim:
                raise StructureError("curvature must be basic on the source")
            coeff = ctx._own(coeff)
            if coeff:
                terms[idx] = coeff
        return terms

    @staticmethod
    def _as_twist(model, value):
        if value is None:
            return None
        if isinstance(value, TwistClass):
            form = value.form
            if form.space is not model:
                # positional transplant; closedness is re-checked below
                form = DifferentialForm(model, dict(form.terms))
            return TwistClass(model, form)
        return TwistClass(model, value)

    def _build_correspondence(self):
        src = self.source
        m = src.dim
        ctx = src.ctx
        zero = ctx.zero()
        structure = [[[zero] * (m + 1) for _ in range(m + 1)]
                     for _ in range(m + 1)]
        for a in range(m):
            for b in range(m):
                for e in range(m):
                    structure[a][b][e] = src.structure[a][b][e]
        # the new direction is central; brackets of old directions pick up
        # a component along it from the declared curvature
        for (a, b), coeff in self._curvature_terms.items():
            structure[a][b][m] = -coeff
            structure[b][a][m] = coeff
        corr = FrameModel(
            src.name + "+" + self.dual_fiber_names[0],
            ctx,
            src.frame_names + (self.dual_fiber_names[0],),
            src.coframe_names + (self.dual_fiber_names[1],),
            structure,
            [None] * (m + 1),
            src.derivation_names + (None,),
            src.points,
            validate=False)
        corr.d_coframe_table = tuple(
            [corr.lift_form(df) for df in src.d_coframe_table]
            + [DifferentialForm(corr, dict(self._curvature_terms))])
        corr._validate()
        return corr

    def _build_dual(self):
        src = self.source
        m = src.dim
        q = self.fiber_index
        ctx = src.ctx
        zero = ctx.zero()
        frames = list(src.frame_names)
        frames[q] = self.dual_fiber_names[0]
        coframes = list(src.coframe_names)
        coframes[q] = self.dual_fiber_names[1]
        structure = [[[zero] * m for _ in range(m)] for _ in range(m)]
        for a in range(m):
            if a == q:
                continue
            for b in range(m):
                if b == q:
                    continue
                for e in range(m):
                    if e != q:
                        structure[a][b][e] = src.structure[a][b][e]
        for (a, b), coeff in self._curvature_terms.items():
            structure[a][b][q] = -coeff
            structure[b][a][q] = coeff
        derivations = list(src.derivation_names)
        derivations[q] = None
        dual = FrameModel(
            src.name + "-dual",
            ctx,
            frames,
            coframes,
            structure,
            [None] * m,
            derivations,
            src.points,
            validate=False)
        dcof = []
        for e in range(m):
            if e == q:
                dcof.append(DifferentialForm(dual, dict(self._curvature_terms)))
            else:
                kept = {idx: c for idx, c in src.d_coframe_table[e].terms.items()
                        if q not in idx}
                dcof.append(DifferentialForm(dual, kept))
        dual.d_coframe_table = tuple(dcof)
        dual._validate()
        return dual

    def _check_exchange_relation(self):
        corr = self.correspondence
        lhs = (self.F * self.sign).exterior_d()
        rhs = DifferentialForm.zero(corr)
        if self.twist is not None:
            rhs = rhs + corr.lift_form(self.twist.form)
        if self.dual_twist is not None:
            pmap = {p: p for p in range(self.source.dim)}
            pmap[self.fiber_index] = self.source.dim
            rhs = rhs - DifferentialForm(
                corr, _remap_terms(self.dual_twist.form.terms, pmap))
        if lhs != rhs:
            raise StructureError(
                "the exchange two-form does not differentiate to the "
                "twist difference")

    # -- transport -------------------------------------------------------

    def _require_invariant(self, coeffs):
        dname = self.source.derivation_names[self.fiber_index]
        if dname is None:
            return
        for coeff in coeffs:
            try:
                moved = coeff.derive(dname)
            except SecondOrderDerivativeRequired:
                raise StructureError(
                    "cannot certify fiber invariance of %s" % (coeff,))
            if moved:
                raise StructureError(
                    "coefficient %s varies along the duality fiber" % (coeff,))

    def phi(self, x: GenSection) -> GenSection:
        """Transport a section: fiber frame and coframe components swap."""
        if x.model is not self.source:
            raise StructureError("section must live on the source model")
        self._require_invariant(list(x.vec) + list(x.form))
        q = self.fiber_index
        vec = list(x.vec)
        form = list(x.form)
        fiber_vec = vec[q]
        fiber_form = form[q]
        vec[q] = fiber_form * self._minus_inv_a
        form[q] = fiber_vec * self._minus_a
        return GenSection(self.dual_model, vec, form)

    def tau(self, rho: DifferentialForm) -> DifferentialForm:
        """Transport a form: wedge with exp(F), read the fiber coefficient."""
        if rho.space is not self.source:
            raise StructureError("form must live on the source model")
        self._require_invariant(rho.terms.values())
        lifted = self.correspondence.lift_form(rho)
        # F wedges with itself to zero, so exp(F) = 1 + F exactly
        total = lifted + self.F.wedge(lifted)
        q = self.fiber_index
        last = self.source.dim
        out = {}
        for idx, coeff in total.terms.items():
            if q not in idx:
                continue
            pos = idx.index(q)
            if pos % 2:
                coeff = -coeff
            rest = [t for t in idx if t != q]
            mapped = [q if t == last else t for t in rest]
            sidx, sgn = _sorted_with_sign(mapped)
            if sgn < 0:
                coeff = -coeff
            prev = out.get(sidx)
            out[sidx] = coeff if prev is None else prev + coeff
        return DifferentialForm(self.dual_model, out)

    # -- inversion -------------------------------------------------------

    def reverse(self) -> "TDualPair":
        """The dualization going back, built on the dual model.

        The curvature of the reverse pair is the differential of the old
        fiber coframe, which must be basic.  When the double dual's
        tables reproduce the source model exactly, the reverse pair
        adopts the source instance as its dual model; otherwise the
        round trip lands on a fresh presentation (this happens when the
        fiber direction does not commute with the rest of the frame).
        """
        src = self.source
        q = self.fiber_index
        curv = src.d_coframe_table[q]
        for idx in curv.terms:
            if q in idx:
                raise StructureError(
                    "differential of %s is not basic; cannot reverse"
                    % self.fiber_names[1])
        kwargs = dict(
            fiber=self.dual_fiber_names,
            dual_fiber=self.fiber_names,
            coefficient=-self.coefficient,
            sign=-self.sign,
            twist=self.dual_twist,
            dual_twist=self.twist,
            dual_curvature=dict(curv.terms),
            name=self.name + "-reverse")
        probe = TDualPair(self.dual_model, **kwargs)
        ok, _ = _tables_match(probe.dual_model, src)
        if ok:
            return TDualPair(self.dual_model, dual_model=src, **kwargs)
        return probe


def phi_F(setup: TDualPair, x: GenSection) -> GenSection:
    """Section transport of ``setup``; see ``TDualPair.phi``."""
    return setup.phi(x)


def tau_F(setup: TDualPair, rho: DifferentialForm) -> DifferentialForm:
    """Form transport of ``setup``; see ``TDualPair.tau``."""
    return setup.tau(rho)


# ---------------------------------------------------------------------------
# structure transport


def dualize_structure(setup: TDualPair, structure: ExampleStructure):
    """Push a full structure through the dualization.

    Frames and isotropic sections go through ``phi``; the spinor pair
    goes through ``tau``, with the first spinor negated so that both
    exchange identities hold on the nose.  The result is validated from
    scratch on the dual model.
    """
    if structure.model is not setup.source:
        raise StructureError("structure lives on a different model")
    pair = structure.pair
    e1 = setup.phi(pair.e1)
    e2 = setup.phi(pair.e2)
    l_sections = tuple(setup.phi(l) for l in pair.l_sections)
    dual_pair = ContactPair(setup.dual_model, (e1, e2), l_sections)
    dual_triple = triple_from_pair(dual_pair)
    mixed = None
    if structure.mixed_pair is not None:
        mp = structure.mixed_pair
        rho1 = -setup.tau(mp.rho1)
        rho2 = setup.tau(mp.rho2)
        mixed = MixedPair(setup.dual_model, rho1, rho2, e1, e2)
    return ExampleStructure(
        structure.name + "-dual",
        setup.dual_model,
        dual_pair,
        dual_triple,
        mixed_pair=mixed,
        twist=setup.dual_twist,
        extras={"duality": setup.name})


# ---------------------------------------------------------------------------
# type accounting


class TypeChangeRow:
    """One sample point of a type change report."""

    __slots__ = ("index", "source_type", "dual_type", "spinor_types",
                 "dual_spinor_types", "js", "predicted_shift", "actual_shift",
                 "shift_ok", "spinor_ok", "anchor_predicted", "anchor_actual",
                 "anchor_ok")

    def __init__(self, **fields):
        for key, value in fields.items():
            setattr(self, key, value)

    def line(self):
        return ("point %d: (p,t) (%d,%d) -> (%d,%d) | spinor types (%d,%d) "
                "-> (%d,%d) | j (%d,%d) | shift pred %+d act %+d %s | "
                "anchor rule pred %d act %d %s"
                % (self.index,
                   self.source_type[0], self.source_type[1],
                   self.dual_type[0], self.dual_type[1],
                   self.spinor_types[0], self.spinor_types[1],
                   self.dual_spinor_types[0], self.dual_spinor_types[1],
                   self.js[0], self.js[1],
                   self.predicted_shift, self.actual_shift,
                   "ok" if self.shift_ok and self.spinor_ok else "MISMATCH",
                   self.anchor_predicted, self.anchor_actual,
                   "ok" if self.anchor_ok else "MISMATCH"))


class TypeChangeReport:
    """Pointwise type bookkeeping for one dualized structure.

    ``ok`` covers the degree displacement rules (structure type shift
    equals j1 + j2 - 1 and each spinor type moves by 2j - 1); the anchor
    projection rule is tracked separately in ``anchor_rule_ok`` because
    it is a statement about images, not degrees, and has its own
    failure modes.
    """

    def __init__(self, setup_name, rows):
        self.setup_name = setup_name
        self.rows = list(rows)
        self.ok = all(r.shift_ok and r.spinor_ok for r in self.rows)
        self.anchor_rule_ok = all(r.anchor_ok for r in self.rows)

    def lines(self):
        out = ["type change under %s (fiber rank 1)" % self.setup_name]
        out.extend(r.line() for r in self.rows)
        out.append("displacement rule: %s" % ("PASS" if self.ok else "FAIL"))
        out.append("anchor projection rule: %s"
                   % ("PASS" if self.anchor_rule_ok else "FAIL"))
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _presentation_j(setup, omega, factor):
    """Smallest power of (F + i omega) putting a fiber leg under factor."""
    corr = setup.correspondence
    i_unit = corr.ctx.constant(QQi(0, 1))
    step = setup.F + corr.lift_form(omega) * i_unit
    power = DifferentialForm.from_scalar(corr, 1)
    lifted = corr.lift_form(factor)
    q = setup.fiber_index
    for j in range(corr.dim + 1):
        test = power.wedge(lifted)
        if any(q in idx for idx in test.terms):
            return j
        power = power.wedge(step)
    raise StructureError("no fiber component appears under the presentation")


def _pointwise_j(setup, rho, point):
    """1 when the lowest-degree part at the point has no fiber leg, else 0."""
    ev = rho.evaluate_at(point)
    if not ev.terms:
        raise StructureError("spinor form vanishes at a sample point")
    k = min(len(idx) for idx in ev.terms)
    q = setup.fiber_index
    return 1 if all(q not in idx for idx in ev.terms if len(idx) == k) else 0


def _horizontal_anchor_nonzero(sections, fiber_index, point):
    for section in sections:
        for p, coeff in enumerate(section.vec):
            if p == fiber_index:
                continue
            if coeff and coeff.evaluate(point):
                return True
    return False


def type_change_report(setup: TDualPair, structure: ExampleStructure,
                       dual_structure=None) -> TypeChangeReport:
    """Tabulate source/dual types pointwise and check the shift rules."""
    if structure.mixed_pair is None:
        raise StructureError("a spinor mixed pair is required for the report")
    if dual_structure is None:
        dual_structure = dualize_structure(setup, structure)
    mp = structure.mixed_pair
    dual_mp = dual_structure.mixed_pair
    src_types = geometric_type(structure.pair).pairs
    dual_types = geometric_type(dual_structure.pair).pairs
    global_js = None
    if mp.presentation is not None:
        global_js = tuple(_presentation_j(setup, omega, factor)
                          for omega, factor in mp.presentation)
    src_e = (structure.pair.e1, structure.pair.e2)
    dual_e = (dual_structure.pair.e1, dual_structure.pair.e2)
    rows = []
    for index, point in enumerate(setup.source.points):
        p, t = src_types[index]
        pd, td = dual_types[index]
        t1 = mp.rho1.type_at(point)
        t2 = mp.rho2.type_at(point)
        td1 = dual_mp.rho1.type_at(point)
        td2 = dual_mp.rho2.type_at(point)
        if global_js is not None:
            j1, j2 = global_js
        else:
            j1 = _pointwise_j(setup, mp.rho1, point)
            j2 = _pointwise_j(setup, mp.rho2, point)
        predicted = j1 + j2 - 1
        actual = td - t
        spinor_ok = (td1 == t1 + 2 * j1 - 1) and (td2 == t2 + 2 * j2 - 1)
        src_push = _horizontal_anchor_nonzero(src_e, setup.fiber_index, point)
        dual_push = _horizontal_anchor_nonzero(dual_e, setup.fiber_index, point)
        anchor_predicted = 0 if (not src_push and not dual_push) else 1
        anchor_actual = abs(pd - p)
        rows.append(TypeChangeRow(
            index=index,
            source_type=(p, t),
            dual_type=(pd, td),
            spinor_types=(t1, t2),
            dual_spinor_types=(td1, td2),
            js=(j1, j2),
            predicted_shift=predicted,
            actual_shift=actual,
            shift_ok=(predicted == actual),
            spinor_ok=spinor_ok,
            anchor_predicted=anchor_predicted,
            anchor_actual=anchor_actual,
            anchor_ok=(anchor_predicted == anchor_actual)))
    return TypeChangeReport(setup.name, rows)


# ---------------------------------------------------------------------------
# consistency checks


class DualityCheckReport:
    """Accumulated pass/fail lines for one battery of checks."""

    def __init__(self, title):
        self.title = title
        self.lines = []
        self.ok = True

    def record(self, label, ok, detail=""):
        line = "%s: %s" % (label, "PASS" if ok else "FAIL")
        if detail:
            line += " (%s)" % detail
        self.lines.append(line)
        self.ok = self.ok and ok

    def info(self, label, detail):
        self.lines.append("%s: %s" % (label, detail))

    def __str__(self):
        return "\n".join([self.title] + self.lines)


def _default_spinors(setup):
    src = setup.source
    ctx = src.ctx
    out = [DifferentialForm.from_scalar(src, 1)]
    out.extend(DifferentialForm(src, {(p,): ctx.one()})
               for p in range(src.dim))
    q = setup.fiber_index
    basic = [p for p in range(src.dim) if p != q]
    if basic:
        pair = tuple(sorted((q, basic[0])))
        out.append(DifferentialForm(src, {pair: ctx.one()}))
    if len(basic) >= 2:
        out.append(DifferentialForm(
            src, {(basic[0], basic[1]): ctx.one()}))
    return out


def intertwiner_check(setup: TDualPair, spinors=None) -> DualityCheckReport:
    """Pairing, bracket and Clifford compatibility of the transport maps.

    The pairing identity is checked on every generator pair.  Bracket
    compatibility only makes sense on sections invariant along the
    fiber, so generators failing that are filtered out first and the
    check runs on the remaining pairs.  The Clifford identity
    ``tau(x . rho) = -phi(x) . tau(rho)`` is pointwise algebra and is
    checked for every generator against a spinor sample.
    """
    report = DualityCheckReport("intertwiner check for %s" % setup.name)
    src = setup.source
    gens = src.generator_sections()
    names = list(src.frame_names) + list(src.coframe_names)
    images = [setup.phi(g) for g in gens]

    bad = []
    count = 0
    for i, x in enumerate(gens):
        for j in range(i, len(gens)):
            count += 1
            if inner_product(images[i], images[j]) != inner_product(x, gens[j]):
                bad.append("(%s,%s)" % (names[i], names[j]))
    report.record("pairing preserved on generators", not bad,
                  "%d pairs" % count if not bad else ", ".join(bad))

    fiber_section = src.frame_section(setup.fiber_index)
    zero = src.zero_section()
    invariant = [i for i, g in enumerate(gens)
                 if dorfman(fiber_section, g, twist=setup.twist) == zero]
    report.info("invariant generators",
                ", ".join(names[i] for i in invariant) or "none")
    bad = []
    count = 0
    for i in invariant:
        for j in invariant:
            count += 1
            lhs = setup.phi(dorfman(gens[i], gens[j], twist=setup.twist))
            rhs = dorfman(images[i], images[j], twist=setup.dual_twist)
            if lhs != rhs:
                bad.append("(%s,%s)" % (names[i], names[j]))
    report.record("brackets intertwined on invariant generators", not bad,
                  "%d pairs" % count if not bad else ", ".join(bad))

    if spinors is None:
        spinors = _default_spinors(setup)
    bad = []
    count = 0
    for i, x in enumerate(gens):
        for rho in spinors:
            count += 1
            lhs = setup.tau(x.clifford(rho))
            rhs = -(images[i].clifford(setup.tau(rho)))
            if lhs != rhs:
                bad.append(names[i])
    report.record("clifford action intertwined up to one sign", not bad,
                  "%d identities" % count if not bad else ", ".join(sorted(set(bad))))
    return report


def _reflect_section(setup, x):
    q = setup.fiber_index
    vec = list(x.vec)
    form = list(x.form)
    vec[q] = -vec[q]
    form[q] = -form[q]
    return vec, form


def _reflect_terms(setup, terms):
    q = setup.fiber_index
    return {idx: (-c if q in idx else c) for idx, c in terms.items()}


def double_duality_check(setup: TDualPair, structure=None,
                         test_forms=None) -> DualityCheckReport:
    """Dualize twice and compare with the fiber reflection of the input.

    Applying ``tau`` forth and back multiplies by the coefficient and
    negates every monomial containing the fiber leg; ``phi`` forth and
    back negates the two fiber components of a section.  When a
    structure with a spinor pair is supplied, the whole structure is
    pushed through both dualizations and compared the same way.
    """
    report = DualityCheckReport("double duality check for %s" % setup.name)
    rev = setup.reverse()
    report.record("reverse dualization constructed", True,
                  "coefficient %s, sign %+d" % (rev.coefficient, rev.sign))
    recovered, why = _tables_match(rev.dual_model, setup.source)
    report.info("double dual model equals the source presentation",
                "yes" if recovered else "no (%s)" % why)
    report.model_recovered = recovered

    scale = setup.source.ctx.constant(setup.coefficient)
    if test_forms is None:
        test_forms = _default_spinors(setup)
    bad = 0
    for w in test_forms:
        back = rev.tau(setup.tau(w))
        expected = {idx: c * scale
                    for idx, c in _reflect_terms(setup, w.terms).items()}
        if back.terms != {idx: c for idx, c in expected.items() if c}:
            bad += 1
    report.record("forms return scaled by the coefficient and reflected",
                  bad == 0, "%d forms" % len(test_forms) if not bad
                  else "%d mismatches" % bad)

    bad = 0
    gens = setup.source.generator_sections()
    for g in gens:
        back = rev.phi(setup.phi(g))
        vec, form = _reflect_section(setup, g)
        if list(back.vec) != vec or list(back.form) != form:
            bad += 1
    report.record("sections return fiber-reflected", bad == 0,
                  "%d generators" % len(gens) if not bad
                  else "%d mismatches" % bad)

    if structure is not None:
        dual_structure = dualize_structure(setup, structure)
        doubled = dualize_structure(rev, dual_structure)
        ok = True
        for original, twice in ((structure.pair.e1, doubled.pair.e1),
                                (structure.pair.e2, doubled.pair.e2)):
            vec, form = _reflect_section(setup, original)
            if list(twice.vec) != vec or list(twice.form) != form:
                ok = False
        for original, twice in zip(structure.pair.l_sections,
                                   doubled.pair.l_sections):
            vec, form = _reflect_section(setup, original)
            if list(twice.vec) != vec or list(twice.form) != form:
                ok = False
        report.record("structure frames return fiber-reflected", ok)
        if structure.mixed_pair is not None:
            mp = structure.mixed_pair
            dd = doubled.mixed_pair
            ok = True
            for original, twice in ((mp.rho1, dd.rho1), (mp.rho2, dd.rho2)):
                expected = {idx: c * scale for idx, c
                            in _reflect_terms(setup, original.terms).items()}
                if twice.terms != {i: c for i, c in expected.items() if c}:
                    ok = False
            report.record("spinor pair returns scaled and reflected", ok)
    return report


# ---------------------------------------------------------------------------
# shipped dual pairs


_DUALITY_BUILDERS = {}


def _register(name):
    def deco(fn):
        _DUALITY_BUILDERS[name] = fn
        return fn
    return deco


def duality_names():
    return sorted(_DUALITY_BUILDERS)


def builtin_pair(name, **params):
    """A shipped dualization plus the structure it acts on, by name."""
    try:
        builder = _DUALITY_BUILDERS[name]
    except KeyError:
        raise StructureError(
            "unknown dual pair %r; available: %s"
            % (name, ", ".join(duality_names())))
    return builder(**params)


@_register("hopf")
def _hopf_pair(**params):
    """Dualize the round-sphere invariant family along its circle fiber.

    The fiber frame direction does not commute with the horizontal
    frame, so the dual model is a flat presentation with the curvature
    moved wholesale into the dual twist form.
    """
    structure = build_example("hopf-family", **params)
    setup = TDualPair(
        structure.model,
        ("V1", "nu1"),
        ("Vt1", "nt1"),
        Fraction(-1),
        sign=-1,
        twist=structure.twist,
        dual_twist="2*nt1^nu2^nu3",
        name="hopf")
    return setup, structure


@_register("heisenberg")
def _heisenberg_pair(b=0, c=0):
    """Dualize the nilmanifold family along its central direction.

    The central coframe direction has a nonzero differential, which the
    dualization trades for a twist form on a flat torus.
    """
    structure = build_example("heisenberg", b=b, c=c)
    setup = TDualPair(
        structure.model,
        ("X3", "al3"),
        ("Xt3", "alt3"),
        Fraction(1),
        sign=-1,
        dual_twist="al1^al2^alt3",
        name="heisenberg")
    return setup, structure


@_register("trivial-circle")
def _trivial_pair():
    """Dualize a flat torus direction: both sides stay flat and untwisted."""
    structure = build_example("cosymplectic")
    setup = TDualPair(
        structure.model,
        ("X3", "al3"),
        ("Xt3", "alt3"),
        Fraction(-1),
        sign=1,
        name="trivial-circle")
    return setup, structure
