"""Ready-made structures on the packaged frame models.

Every builder returns an ``ExampleStructure`` bundling a frame model, a
validated isotropic pair, its endomorphism presentation, and, where a
polynomial representative exists, a spinor mixed pair.  The catalog
covers one family per qualitative behaviour:

``s3-family``
    structures on the round 3-sphere parametrized by a scalar pair,
    optionally read off a holomorphic expression in two complex
    coordinates; supports a fully symbolic variant and a volume twist.
``hopf-family``
    the fiber-invariant subfamily, closed under circle dualization.
``cosymplectic``, ``almost-contact``, ``product``
    flat split models on tori: a 2-form/1-form structure, a tangent
    endomorphism structure, and a 5-dimensional product structure.
``heisenberg``
    the two-parameter family on the compact nilmanifold quotient.
``deformation``
    a finite graph deformation of any base example's isotropic bundle.
``triple-contact-7d``
    the four-element family determined by a triple of compatible
    structures in dimension 7.

``closed_two_forms`` lists closed 2-forms per model for gauge-invariance
checks.
"""

from __future__ import annotations

from fractions import Fraction

from .ring import QQi, ScalarContext
from .linear import matrix_rank
from .forms import DifferentialForm
from .frame import GenSection, TwistClass, inner_product
from .contact import (
    HALF,
    ContactPair,
    ContactTriple,
    StructureError,
    _evaluated_matrix,
    _scalar,
    almost_contact_structure,
    cosymplectic_structure,
    mixed_pair_from_pair,
    pair_from_triple,
    phi_from_images,
    triple_from_pair,
)
from .models import builtin_model


class ExampleStructure:
    """A named bundle: model, pair, triple, and optional spinor data."""

    __slots__ = ("name", "model", "pair", "triple", "mixed_pair", "twist",
                 "extras")

    def __init__(self, name, model, pair, triple, mixed_pair=None,
                 twist=None, extras=None):
        self.name = name
        self.model = model
        self.pair = pair
        self.triple = triple
        self.mixed_pair = mixed_pair
        self.twist = twist
        self.extras = dict(extras or {})

    def __repr__(self):
        return "<example %s on %s>" % (self.name, self.model.name)


_BUILDERS = {}


def _register(name):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn
    return deco


def build_example(name: str, **params) -> ExampleStructure:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise StructureError(
            "unknown example %r; available: %s"
            % (name, ", ".join(sorted(_BUILDERS))))
    return builder(**params)


def example_names():
    return sorted(_BUILDERS)


def _exact(value, what="parameter") -> Fraction:
    # floats would smuggle binary rounding into exact arithmetic
    if isinstance(value, float):
        raise StructureError("%s must be an exact rational, not a float" % what)
    return Fraction(value)


# -- closed 2-forms per model -------------------------------------------

_CLOSED_TWO_FORMS = {
    "s3": ("nu1^nu2", "nu1^nu3", "nu2^nu3"),
    "s3_formal": ("nu1^nu2", "nu1^nu3", "nu2^nu3"),
    "hopf_s3": ("nu1^nu2", "nu1^nu3", "nu2^nu3"),
    "heisenberg": ("al1^al2", "al1^al3", "al2^al3"),
    "torus3": ("al1^al2", "al1^al3", "al2^al3"),
    "torus5": ("al1^al2", "al3^al4", "al2^al5"),
    "triple7": ("et1^et2", "m1^m2", "et3^m3"),
}


def closed_two_forms(model):
    """A few closed 2-forms on the model, for gauge-invariance checks."""
    texts = _CLOSED_TWO_FORMS.get(model.name)
    if texts is not None:
        forms = [model.form(t) for t in texts]
    else:
        forms = []
        for a in range(model.dim):
            for b in range(a + 1, model.dim):
                w = model.form("%s^%s" % (model.coframe_names[a],
                                          model.coframe_names[b]))
                if w.exterior_d().is_zero():
                    forms.append(w)
                if len(forms) == 3:
                    break
            if len(forms) == 3:
                break
    for w in forms:
        if not w.exterior_d().is_zero():
            raise StructureError("catalog 2-form on %s is not closed"
                                 % model.name)
    return forms


# -- 3-sphere families ---------------------------------------------------

def _scalars_from_holomorphic(model, text):
    """Real and imaginary part of an expression in z = x1+i*x2, w = x3+i*x4."""
    hctx = ScalarContext(("z", "w"))
    ctx = model.ctx
    i_unit = QQi(0, 1)
    images = {
        "z": ctx.parse("x1") + ctx.parse("x2") * i_unit,
        "w": ctx.parse("x3") + ctx.parse("x4") * i_unit,
    }
    value = hctx.parse(text).map_into(ctx, images)
    fe = (value + value.conj()) * HALF
    ge = (value - value.conj()) * QQi(0, Fraction(-1, 2))
    return fe, ge


def _invariant_sphere_structure(model, fe, ge, twist=None, name="s3-family",
                                extras=None):
    i_unit = QQi(0, 1)
    e1 = model.section("-V1")
    e2 = (model.section("-nu1")
          - model.frame_section("V2") * fe
          - model.frame_section("V3") * ge)
    l1 = model.section("V2 - i*V3")
    l2 = (model.section("nu3 + i*nu2")
          - model.frame_section("V1") * (ge + fe * i_unit))
    pair = ContactPair(model, (e1, e2), (l1, l2))
    triple = triple_from_pair(pair)
    mixed = mixed_pair_from_pair(pair, triple, rho1=model.form("i*nu2 + nu3"))
    base = {"f": fe, "g": ge}
    base.update(extras or {})
    return ExampleStructure(name, model, pair, triple, mixed_pair=mixed,
                            twist=twist, extras=base)


@_register("s3-family")
def _s3_family(h=None, f=None, g=None, formal=False, twisted=False, c=1):
    """Sphere structures driven by a scalar pair (f, g).

    ``h`` gives both scalars at once as a polynomial in the complex
    combinations z, w of the ambient coordinates.  ``formal=True``
    switches to the model whose scalars stay symbolic; ``twisted=True``
    adds the volume twist (symbolic coefficient on the formal model,
    the exact value ``c`` otherwise).
    """
    model = builtin_model("s3_formal" if formal else "s3")
    ctx = model.ctx
    if formal:
        if h is not None or f is not None or g is not None:
            raise StructureError("the symbolic family fixes its own scalars")
        fe, ge = ctx.gen("f"), ctx.gen("g")
    elif f is not None or g is not None:
        if f is None or g is None:
            raise StructureError("give both scalars or neither")
        fe, ge = ctx.parse(f) if isinstance(f, str) else ctx._own(f), \
            ctx.parse(g) if isinstance(g, str) else ctx._own(g)
    else:
        fe, ge = _scalars_from_holomorphic(model, h if h is not None else "0")
    twist = None
    if twisted:
        coeff = "c" if formal else str(_exact(c, "twist coefficient"))
        twist = TwistClass(model, "%s*nu1^nu2^nu3" % coeff)
    extras = {"h": h, "formal": formal}
    return _invariant_sphere_structure(model, fe, ge, twist=twist,
                                       name="s3-family", extras=extras)


@_register("hopf-family")
def _hopf_family(f=None, g=None, formal=True):
    """The fiber-invariant sphere subfamily.

    The scalars must be constant along the first frame direction; the
    symbolic variant builds that into its derivation table, the concrete
    default uses an invariant quadratic pair.
    """
    if formal:
        if f is not None or g is not None:
            raise StructureError("the symbolic family fixes its own scalars")
        model = builtin_model("hopf_s3")
        fe, ge = model.ctx.gen("f"), model.ctx.gen("g")
    else:
        model = builtin_model("s3")
        fe = model.ctx.parse(f if f is not None else "x1*x3 + x2*x4")
        ge = model.ctx.parse(g if g is not None else "x2*x3 - x1*x4")
    for name, value in (("f", fe), ("g", ge)):
        if value.derive("V1"):
            raise StructureError(
                "scalar %s is not invariant along the fiber direction" % name)
    return _invariant_sphere_structure(
        model, fe, ge, name="hopf-family",
        extras={"formal": formal, "fiber_invariant": True})


# -- flat torus structures ----------------------------------------------

@_register("cosymplectic")
def _cosymplectic(theta="al1^al2", eta="al3", model="torus3"):
    """A 2-form/1-form structure; flat 3-torus by default.

    ``model`` may name any builtin whose coframe spans the two forms;
    the defining pointwise conditions are checked, differential ones
    (closedness) are left to the normality checks.
    """
    model = builtin_model(model) if isinstance(model, str) else model
    theta_form = model.form(theta) if isinstance(theta, str) else theta
    eta_form = model.form(eta) if isinstance(eta, str) else eta
    pair, triple = cosymplectic_structure(model, theta_form, eta_form)
    i_unit = QQi(0, 1)
    one = DifferentialForm.from_scalar(model, model.ctx.one())
    rho1 = one + theta_form * i_unit
    mixed = mixed_pair_from_pair(
        pair, triple, rho1=rho1,
        presentation=((theta_form, one), (theta_form, eta_form)))
    return ExampleStructure("cosymplectic", model, pair, triple,
                            mixed_pair=mixed,
                            extras={"theta": theta_form, "eta": eta_form})


@_register("almost-contact")
def _almost_contact():
    """The flat tangent endomorphism structure on the 3-torus."""
    model = builtin_model("torus3")
    zero, one = model.ctx.zero(), model.ctx.one()
    phi = ((zero, -one, zero), (one, zero, zero), (zero, zero, zero))
    pair, triple = almost_contact_structure(
        model, phi, model.section("X3"), model.section("al3"))
    mixed = mixed_pair_from_pair(pair, triple, rho1=model.form("al1 - i*al2"))
    return ExampleStructure("almost-contact", model, pair, triple,
                            mixed_pair=mixed,
                            extras={"xi": "X3", "eta": "al3"})


@_register("product")
def _product():
    """A 5-torus structure transverse to two flat complex 2-planes."""
    model = builtin_model("torus5")
    pair = ContactPair(
        model,
        (model.section("X3"), model.section("al3")),
        (model.section("X1 - i*X2"), model.section("al1 - i*al2"),
         model.section("X4 - i*X5"), model.section("al4 - i*al5")))
    triple = triple_from_pair(pair)
    rho1 = model.form("al1 - i*al2").wedge(model.form("al4 - i*al5"))
    mixed = mixed_pair_from_pair(pair, triple, rho1=rho1)
    return ExampleStructure("product", model, pair, triple, mixed_pair=mixed)


@_register("heisenberg")
def _heisenberg(b=0, c=0):
    """The two-parameter nilmanifold family.

    The 2-form mixes the base area form with both mixed area forms; the
    1-form is the left-invariant connection form.
    """
    model = builtin_model("heisenberg")
    bq = _exact(b, "parameter b")
    cq = _exact(c, "parameter c")
    theta = (model.form("al2^al3")
             + model.form("al1^al2") * bq
             + model.form("al1^al3") * cq)
    eta = model.form("al1")
    pair, triple = cosymplectic_structure(model, theta, eta)
    i_unit = QQi(0, 1)
    one = DifferentialForm.from_scalar(model, model.ctx.one())
    rho1 = one + theta * i_unit
    mixed = mixed_pair_from_pair(
        pair, triple, rho1=rho1,
        presentation=((theta, one), (theta, eta)))
    return ExampleStructure("heisenberg", model, pair, triple,
                            mixed_pair=mixed,
                            extras={"b": bq, "c": cq, "theta": theta,
                                    "eta": eta})


# -- graph deformations --------------------------------------------------

def _epsilon_matrix(model, epsilon, rank):
    zero = model.ctx.zero()
    if epsilon is None:
        return [[zero] * rank for _ in range(rank)]
    if not isinstance(epsilon, (list, tuple)):
        value = _scalar(model, epsilon)
        if value:
            raise StructureError(
                "a scalar deformation parameter must be zero; "
                "give a skew matrix otherwise")
        return [[zero] * rank for _ in range(rank)]
    rows = [[_scalar(model, v) for v in row] for row in epsilon]
    if len(rows) != rank or any(len(row) != rank for row in rows):
        raise StructureError("deformation matrix must be %d x %d"
                             % (rank, rank))
    for i in range(rank):
        for j in range(rank):
            if rows[i][j] != -rows[j][i]:
                raise StructureError("deformation matrix must be skew")
    return rows


@_register("deformation")
def _deformation(base=None, epsilon=None, **base_params):
    """Deform a base example's isotropic bundle along its conjugate.

    The parameter is a skew matrix of coefficients over the conjugate
    frame; each section picks up the conjugate combination contracted
    through the doubled pairing.  A zero parameter returns the base
    sections unchanged.
    """
    if base is None:
        base = "almost-contact"
    if isinstance(base, str):
        base = build_example(base, **base_params)
    elif base_params:
        raise StructureError("base parameters need a base name")
    model = base.model
    ls = list(base.pair.l_sections)
    conj = [l.conj() for l in ls]
    rank = len(ls)
    eps = _epsilon_matrix(model, epsilon, rank)
    two = model.ctx.constant(Fraction(2))
    gram = [[inner_product(ls[k], conj[i]) for i in range(rank)]
            for k in range(rank)]
    ampl = [[sum((two * gram[k][i] * eps[i][j] for i in range(rank)),
                 model.ctx.zero())
             for j in range(rank)]
            for k in range(rank)]
    # the deformed bundle stays transverse to its conjugate only while
    # the correction matrix keeps 1 away from the spectrum of A*conj(A)
    zero = model.ctx.zero()
    one = model.ctx.one()
    mixing = []
    for k in range(rank):
        row = []
        for j in range(rank):
            acc = one if k == j else zero
            for p in range(rank):
                acc = acc - ampl[k][p] * ampl[p][j].conj()
            row.append(acc)
        mixing.append(row)
    for point in model.points:
        res, rows = _evaluated_matrix(model, mixing, point)
        if matrix_rank(res, rows) != rank:
            raise StructureError(
                "deformation degenerates the structure at a sample point")
    deformed = []
    for k in range(rank):
        section = ls[k]
        for j in range(rank):
            if ampl[k][j]:
                section = section + conj[j] * ampl[k][j]
        deformed.append(section)
    pair = ContactPair(model, (base.pair.e1, base.pair.e2), deformed)
    triple = triple_from_pair(pair)
    return ExampleStructure("deformation", model, pair, triple,
                            twist=base.twist,
                            extras={"base": base.name, "epsilon": eps})


# -- the 7-dimensional four-element family -------------------------------

def _sigma_seven(model, x):
    """Flip the sign of the six distinguished directions."""
    vec, form = list(x.vec), list(x.form)
    for a in range(3):
        vec[a] = -vec[a]
        form[a] = -form[a]
    return GenSection(model, vec, form)


def _tau_seven(model, x):
    """Swap the first two distinguished dual pairs, cross the third."""
    vec, form = list(x.vec), list(x.form)
    vec[0], vec[1] = vec[1], vec[0]
    form[0], form[1] = form[1], form[0]
    vec[2], form[2] = -form[2], -vec[2]
    return GenSection(model, vec, form)


_SEVEN_MEMBERS = ("phi0", "sigma", "tau", "sigma-tau")


def _seven_base_images(model):
    """The distinguished member's image table.

    The constant ``r2`` squares to 2, so ``r2/2`` is an exact
    representative of the normalizing square root.
    """
    s = model.scalar("r2/2")
    sec = model.section
    return {
        "xi1": sec("xi3") * s,
        "xi2": sec("et3") * (-s),
        "xi3": (sec("et2") - sec("xi1")) * s,
        "w1": sec("w4"),
        "w2": sec("w3"),
        "w3": sec("-w2"),
        "w4": sec("-w1"),
        "et1": sec("et3") * s,
        "et2": sec("xi3") * (-s),
        "et3": (sec("xi2") - sec("et1")) * s,
        "m1": sec("m4"),
        "m2": sec("m3"),
        "m3": sec("-m2"),
        "m4": sec("-m1"),
    }


def _seven_membership_ok(model, images):
    """The family's defining conditions beyond the triple axioms."""
    span_names = ("xi1", "xi2", "xi3", "et1", "et2", "et3")
    for name in span_names:
        img = images[name]
        for a in range(3, 7):
            if img.vec[a] or img.form[a]:
                return "image of %s leaves the distinguished span" % name
    fixed = {"w1": "w4", "w2": "w3", "w3": "-w2", "w4": "-w1",
             "m1": "m4", "m2": "m3", "m3": "-m2", "m4": "-m1"}
    for name, expected in fixed.items():
        if images[name] != model.section(expected):
            return "restriction to the complement moved at %s" % name
    for a in range(3):
        for b in range(a, 3):
            lhs = inner_product(images["xi%d" % (a + 1)],
                                model.coframe_section(b))
            rhs = inner_product(images["xi%d" % (b + 1)],
                                model.coframe_section(a))
            if lhs + rhs:
                return "mixing coefficients are not skew at (%d,%d)" % (a, b)
    return None


@_register("triple-contact-7d")
def _triple_contact_7d(member="phi0"):
    """One of the four admissible structures in dimension 7.

    ``member`` selects phi0, its sign flip, its swap conjugate, or both
    combined.  Membership conditions are re-verified on the chosen
    images before the triple's own axioms run.
    """
    canonical = str(member).replace("_", "-").replace(" ", "-")
    if canonical == "sigmatau":
        canonical = "sigma-tau"
    if canonical not in _SEVEN_MEMBERS:
        raise StructureError("member must be one of %s"
                             % ", ".join(_SEVEN_MEMBERS))
    model = builtin_model("triple7")
    images = _seven_base_images(model)
    if "tau" in canonical:
        images = {k: _tau_seven(model, v) for k, v in images.items()}
    if "sigma" in canonical:
        images = {k: _sigma_seven(model, v) for k, v in images.items()}
    problem = _seven_membership_ok(model, images)
    if problem:
        raise StructureError(problem)
    ordered = [images[n] for n in model.frame_names]
    ordered.extend(images[n] for n in model.coframe_names)
    phi = phi_from_images(model, ordered)
    e1 = model.section("xi1 + et2")
    e2 = model.section("xi2 + et1") * HALF
    triple = ContactTriple(model, phi, e1, e2)
    pair = pair_from_triple(triple)
    return ExampleStructure("triple-contact-7d", model, pair, triple,
                            extras={"member": canonical,
                                    "family": _SEVEN_MEMBERS})
