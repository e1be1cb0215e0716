"""Declarative check scenarios: loading, execution, and reporting.

A scenario file is line-oriented text with five section kinds:

    [model]       declare a model: ``builtin = <name>`` or verbatim
                  model-file lines, each prefixed with ``|``
    [structure]   build a named structure: ``builder = <catalog name>``
                  plus ``param <key> = <value>`` lines
    [twist]       a named closed 3-form: ``on = <structure or model>``,
                  ``form = <expression>``
    [dualpair]    a circle dualization: ``builtin = <name>`` or explicit
                  ``source`` / ``fiber`` / ``dual_fiber`` /
                  ``coefficient`` / ``sign`` / ``twist`` / ``dual_twist``
                  fields; registers ``<name>-source`` and ``<name>-dual``
                  structures as a side effect
    [checks]      ordered ``check = <name> <target> [key=value ...]``
                  lines

``#`` starts a comment, blank lines separate nothing in particular, an
optional leading ``scenario = <name>`` line names the run.  Expressions
use ``i`` for the imaginary unit, ``^`` for wedge, and exact rationals.

Everything declared is resolved and validated at load time; check
execution starts only on a fully valid scenario.  Checks run in
declaration order (they are independent, so any schedule would produce
the same report; the sequential one keeps assembly deterministic) and
the report is byte-identical across runs on identical input: entries
follow declaration order and no volatile data (timing, paths,
identifiers of the run) is ever included.

A check's verdict is PASS, FAIL or INCONCLUSIVE.  FAIL always carries a
residual or a pointwise witness.  INCONCLUSIVE marks honest refusals
(formal derivative depth exhausted, no spinor representative, search
space exhausted) and is promoted to a failing exit status by --strict.
"""

from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources

from .ring import SecondOrderDerivativeRequired
from .frame import TwistClass, courant_axioms_check, ModelValidationError
from .forms import DifferentialForm
from .contact import (
    StructureError,
    geometric_type,
    integrability_check,
    is_poon_wade,
    mixed_pair_integrability,
    normal_frame_criterion,
    normality_check,
    poon_wade_reduce,
    sekiya_from_triple,
    sekiya_to_cone,
    cone_to_sekiya,
    cone_type_bounds,
    triple_from_sekiya,
    type_sum_check,
)
from .models import builtin_model, list_models, parse_model_text
from .builders import build_example, example_names, ExampleStructure
from .tduality import (
    TDualPair,
    builtin_pair,
    dualize_structure,
    double_duality_check,
    duality_names,
    intertwiner_check,
    type_change_report,
)


class ScenarioError(ValueError):
    """A scenario failed to load or validate; nothing was executed."""


# ---------------------------------------------------------------------------
# parsing


_SECTIONS = ("model", "structure", "twist", "dualpair", "checks")


def _coerce_param(text):
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if re.fullmatch(r"-?\d+/\d+", text):
        return Fraction(text)
    if ";" in text:
        return [[cell.strip() for cell in row.split(",")]
                for row in text.split(";")]
    return text


class _Section:
    __slots__ = ("kind", "lineno", "entries", "verbatim")

    def __init__(self, kind, lineno):
        self.kind = kind
        self.lineno = lineno
        self.entries = []
        self.verbatim = []


def _split_sections(text, source_name):
    sections = []
    current = None
    top_name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            kind = line[1:-1].strip()
            if kind not in _SECTIONS:
                raise ScenarioError(
                    "%s:%d: unknown section [%s]" % (source_name, lineno, kind))
            current = _Section(kind, lineno)
            sections.append(current)
            continue
        if line.startswith("|"):
            if current is None or current.kind != "model":
                raise ScenarioError(
                    "%s:%d: verbatim lines belong in a [model] section"
                    % (source_name, lineno))
            current.verbatim.append(line[1:].strip())
            continue
        if "=" not in line:
            raise ScenarioError(
                "%s:%d: expected key = value, got %r"
                % (source_name, lineno, line))
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if current is None:
            if key == "scenario":
                top_name = value
                continue
            raise ScenarioError(
                "%s:%d: %r appears before any section"
                % (source_name, lineno, key))
        current.entries.append((lineno, key, value))
    return top_name, sections


class CheckSpec:
    """One parsed check line: name, target, textual params."""

    __slots__ = ("name", "target", "params", "raw")

    def __init__(self, name, target, params, raw):
        self.name = name
        self.target = target
        self.params = params
        self.raw = raw


class Scenario:
    """Fully resolved scenario: every name bound, every object validated."""

    def __init__(self, name, source_name):
        self.name = name
        self.source_name = source_name
        self.models = {}
        self.structures = {}
        self.twists = {}
        self.dualpairs = {}
        self.pair_structures = {}
        self.checks = []

    def resolve_model(self, name):
        if name in self.structures:
            return self.structures[name].model
        if name in self.models:
            return self.models[name]
        if name in list_models():
            return builtin_model(name)
        raise ScenarioError("unknown model or structure %r" % (name,))

    def resolve_structure(self, name):
        if name not in self.structures:
            raise ScenarioError("unknown structure %r" % (name,))
        return self.structures[name]

    def resolve_dualpair(self, name):
        if name not in self.dualpairs:
            raise ScenarioError("unknown dual pair %r" % (name,))
        return self.dualpairs[name]


def _entry_map(section, source_name, allowed, repeated=()):
    out = {}
    for lineno, key, value in section.entries:
        base = key.split(None, 1)[0]
        if base not in allowed:
            raise ScenarioError(
                "%s:%d: unknown field %r in [%s]"
                % (source_name, lineno, key, section.kind))
        if base in repeated:
            out.setdefault(base, []).append((lineno, key, value))
        elif base in out:
            raise ScenarioError(
                "%s:%d: duplicate field %r" % (source_name, lineno, key))
        else:
            out[base] = value
    return out


def _builder_params(section, source_name):
    params = {}
    for lineno, key, value in section.entries:
        if not key.startswith("param"):
            continue
        parts = key.split(None, 1)
        if len(parts) != 2:
            raise ScenarioError(
                "%s:%d: param lines look like 'param <name> = <value>'"
                % (source_name, lineno))
        params[parts[1]] = _coerce_param(value)
    return params


def _models_equivalent(built, reference):
    """Structural equality by rendered tables; contexts may differ."""
    if built.frame_names != reference.frame_names:
        return False, "frame names differ"
    if built.coframe_names != reference.coframe_names:
        return False, "coframe names differ"
    if built.derivation_names != reference.derivation_names:
        return False, "derivation bindings differ"
    m = built.dim
    for a in range(m):
        for b in range(m):
            for e in range(m):
                if str(built.structure[a][b][e]) != str(reference.structure[a][b][e]):
                    return False, ("structure tables differ at [%s,%s]"
                                   % (built.frame_names[a], built.frame_names[b]))
    for e in range(m):
        left = {idx: str(c) for idx, c in built.d_coframe_table[e].terms.items()}
        right = {idx: str(c)
                 for idx, c in reference.d_coframe_table[e].terms.items()}
        if left != right:
            return False, ("coframe differentials differ at %s"
                           % built.coframe_names[e])
    if built.points != reference.points:
        return False, "sample points differ"
    return True, ""


def parse_scenario_text(text, source_name="<scenario>") -> Scenario:
    top_name, sections = _split_sections(text, source_name)
    scn = Scenario(top_name or source_name, source_name)
    order = {"model": 0, "structure": 1, "twist": 2, "dualpair": 3, "checks": 4}
    for section in sorted(sections, key=lambda s: (order[s.kind], s.lineno)):
        try:
            _BUILD[section.kind](scn, section, source_name)
        except ScenarioError:
            raise
        except (StructureError, ModelValidationError, ValueError) as exc:
            raise ScenarioError(
                "%s:%d: [%s] failed validation: %s"
                % (source_name, section.lineno, section.kind, exc))
    if not scn.checks:
        raise ScenarioError("%s: no [checks] section with check lines"
                            % source_name)
    return scn


def _build_model(scn, section, source_name):
    fields = _entry_map(section, source_name, ("name", "builtin"))
    if section.verbatim:
        if "builtin" in fields:
            raise ScenarioError(
                "%s:%d: a model is either builtin or verbatim, not both"
                % (source_name, section.lineno))
        model = parse_model_text("\n".join(section.verbatim),
                                 source_name="%s:%d" % (source_name,
                                                        section.lineno))
        name = fields.get("name", model.name)
    elif "builtin" in fields:
        model = builtin_model(fields["builtin"])
        name = fields.get("name", fields["builtin"])
    else:
        raise ScenarioError(
            "%s:%d: [model] needs builtin = <name> or verbatim lines"
            % (source_name, section.lineno))
    if name in scn.models:
        raise ScenarioError("%s:%d: duplicate model name %r"
                            % (source_name, section.lineno, name))
    scn.models[name] = model


def _build_structure(scn, section, source_name):
    fields = _entry_map(section, source_name, ("name", "builder", "param"),
                        repeated=("param",))
    if "builder" not in fields:
        raise ScenarioError("%s:%d: [structure] needs builder = <name>"
                            % (source_name, section.lineno))
    builder = fields["builder"]
    params = _builder_params(section, source_name)
    if isinstance(params.get("base"), str) and params["base"] in scn.structures:
        params["base"] = scn.structures[params["base"]]
    structure = build_example(builder, **params)
    name = fields.get("name", builder)
    if name in scn.structures:
        raise ScenarioError("%s:%d: duplicate structure name %r"
                            % (source_name, section.lineno, name))
    scn.structures[name] = structure


def _build_twist(scn, section, source_name):
    fields = _entry_map(section, source_name, ("name", "on", "form"))
    for needed in ("name", "on", "form"):
        if needed not in fields:
            raise ScenarioError("%s:%d: [twist] needs name, on and form"
                                % (source_name, section.lineno))
    model = scn.resolve_model(fields["on"])
    twist = TwistClass(model, fields["form"])
    if fields["name"] in scn.twists:
        raise ScenarioError("%s:%d: duplicate twist name %r"
                            % (source_name, section.lineno, fields["name"]))
    scn.twists[fields["name"]] = twist


def _build_dualpair(scn, section, source_name):
    fields = _entry_map(
        section, source_name,
        ("name", "builtin", "param", "source", "fiber", "dual_fiber",
         "coefficient", "sign", "twist", "dual_twist", "dual_model"),
        repeated=("param",))
    if "builtin" in fields:
        params = _builder_params(section, source_name)
        setup, carried = builtin_pair(fields["builtin"], **params)
        name = fields.get("name", fields["builtin"])
    else:
        for needed in ("source", "fiber", "dual_fiber", "coefficient"):
            if needed not in fields:
                raise ScenarioError(
                    "%s:%d: explicit [dualpair] needs source, fiber, "
                    "dual_fiber and coefficient"
                    % (source_name, section.lineno))
        carried = scn.resolve_structure(fields["source"])
        twist = None
        if "twist" in fields:
            twist = scn.twists.get(fields["twist"], fields["twist"])
            if isinstance(twist, TwistClass) \
                    and twist.model is not carried.model:
                raise ScenarioError(
                    "%s:%d: twist %r lives on a different model"
                    % (source_name, section.lineno, fields["twist"]))
        setup = TDualPair(
            carried.model,
            tuple(fields["fiber"].split()),
            tuple(fields["dual_fiber"].split()),
            Fraction(fields["coefficient"]),
            sign=int(fields.get("sign", "-1")),
            twist=twist,
            dual_twist=fields.get("dual_twist"),
            name=fields.get("name", "dualpair"))
        name = fields.get("name", "dualpair")
    if "dual_model" in fields:
        reference = scn.resolve_model(fields["dual_model"])
        same, why = _models_equivalent(setup.dual_model, reference)
        if not same:
            raise ScenarioError(
                "%s:%d: built dual disagrees with model %r: %s"
                % (source_name, section.lineno, fields["dual_model"], why))
    if name in scn.dualpairs:
        raise ScenarioError("%s:%d: duplicate dual pair name %r"
                            % (source_name, section.lineno, name))
    scn.dualpairs[name] = setup
    dual = dualize_structure(setup, carried)
    scn.structures[name + "-source"] = carried
    scn.structures[name + "-dual"] = dual
    scn.pair_structures[name] = (carried, dual)


def _build_checks(scn, section, source_name):
    for lineno, key, value in section.entries:
        if key != "check":
            raise ScenarioError("%s:%d: [checks] lines look like "
                                "check = <name> <target> [key=value ...]"
                                % (source_name, lineno))
        tokens = value.split()
        if not tokens:
            raise ScenarioError("%s:%d: empty check line" % (source_name, lineno))
        name = tokens[0]
        if name not in _CHECKS:
            raise ScenarioError(
                "%s:%d: unknown check %r; available: %s"
                % (source_name, lineno, name, ", ".join(check_names())))
        definition = _CHECKS[name]
        target = None
        rest = tokens[1:]
        if rest and "=" not in rest[0]:
            target = rest[0]
            rest = rest[1:]
        if target is None:
            raise ScenarioError("%s:%d: check %s needs a target"
                                % (source_name, lineno, name))
        params = {}
        for token in rest:
            if "=" not in token:
                raise ScenarioError("%s:%d: expected key=value, got %r"
                                    % (source_name, lineno, token))
            pkey, pvalue = token.split("=", 1)
            if pkey not in definition.allowed:
                raise ScenarioError(
                    "%s:%d: check %s does not take %r (allowed: %s)"
                    % (source_name, lineno, name, pkey,
                       ", ".join(sorted(definition.allowed)) or "none"))
            params[pkey] = pvalue
        # resolve the target now so a bad name is a load error
        if definition.kind == "structure":
            scn.resolve_structure(target)
        elif definition.kind == "dualpair":
            scn.resolve_dualpair(target)
        else:
            scn.resolve_model(target)
        scn.checks.append(CheckSpec(name, target, params, value))


_BUILD = {
    "model": _build_model,
    "structure": _build_structure,
    "twist": _build_twist,
    "dualpair": _build_dualpair,
    "checks": _build_checks,
}


# ---------------------------------------------------------------------------
# check registry


class CheckDef:
    __slots__ = ("kind", "fn", "doc", "allowed")

    def __init__(self, kind, fn, doc, allowed=()):
        self.kind = kind
        self.fn = fn
        self.doc = doc
        self.allowed = frozenset(allowed)


_CHECKS = {}


def _check(name, kind, doc, allowed=()):
    def deco(fn):
        _CHECKS[name] = CheckDef(kind, fn, doc, allowed)
        return fn
    return deco


def check_names():
    return sorted(_CHECKS)


def explain_check(name):
    if name not in _CHECKS:
        raise ScenarioError("unknown check %r; available: %s"
                            % (name, ", ".join(check_names())))
    return _CHECKS[name].doc


def _twist_for(scn, structure, params):
    """The twist a check runs under: named, disabled, or the builder's."""
    if "twist" in params:
        value = params["twist"]
        if value == "none":
            return None
        if value not in scn.twists:
            raise ScenarioError("unknown twist %r" % (value,))
        return scn.twists[value]
    return structure.twist


def _expect(params, key, default, options):
    value = params.get(key, default)
    if value not in options:
        raise ScenarioError("%s must be one of %s" % (key, ", ".join(options)))
    return value


def _point_indices(model, point_filter):
    indices = range(len(model.points))
    if point_filter is None:
        return list(indices)
    out = [i for i in point_filter if 0 <= i < len(model.points)]
    if not out:
        raise ScenarioError("point subset %r selects nothing" % (point_filter,))
    return out


def _parse_type_list(text):
    pairs = re.findall(r"\((-?\d+),(-?\d+)\)", text)
    if not pairs:
        raise ScenarioError("expected a type list like (1,2);(2,1)")
    return [(int(p), int(t)) for p, t in pairs]


@_check("courant_axioms", "model",
        "Bracket axioms over all generator triples: the left Leibniz "
        "identity, anchor compatibility with the pairing, and the "
        "self-bracket being the pairing-dual differential of the "
        "self-pairing.  Optional twist by a named closed 3-form.",
        allowed=("twist",))
def _run_courant(scn, target, params, point_filter):
    model = scn.resolve_model(target)
    twist = None
    if "twist" in params:
        if params["twist"] != "none":
            if params["twist"] not in scn.twists:
                raise ScenarioError("unknown twist %r" % (params["twist"],))
            twist = scn.twists[params["twist"]]
    report = courant_axioms_check(model, model.generator_sections(),
                                  twist=twist)
    details = [("identities-checked", str(report.checked))]
    for axiom, indices, residual in report.failures:
        details.append(("residual.%s.%s"
                        % (axiom, "-".join(str(i) for i in indices)), residual))
    for note in report.skipped:
        details.append(("skipped", note))
    if report.failures:
        return "FAIL", details
    if report.skipped:
        return "INCONCLUSIVE", details
    return "PASS", details


@_check("d_squared", "model",
        "The declared coframe differentials compose to zero: applying "
        "the exterior differential twice on every coframe element "
        "normalizes to the zero form.")
def _run_d_squared(scn, target, params, point_filter):
    model = scn.resolve_model(target)
    details = []
    verdict = "PASS"
    for e in range(model.dim):
        try:
            residual = model.d_coframe_table[e].exterior_d()
        except SecondOrderDerivativeRequired as exc:
            details.append(("skipped.%s" % model.coframe_names[e], str(exc)))
            verdict = "INCONCLUSIVE"
            continue
        if residual:
            details.append(("residual.%s" % model.coframe_names[e],
                            str(residual)))
            verdict = "FAIL"
    details.insert(0, ("directions-checked", str(model.dim)))
    return verdict, details


def _integrability_details(verdict):
    details = [("lines-tried", ", ".join(verdict.lines_tried))]
    for branch in verdict.branches:
        if branch.ok:
            details.append(("branch.%s" % branch.name, "involutive"))
        else:
            details.append(("branch.%s" % branch.name,
                            "obstructed at %s" % (branch.failing_bracket,)))
            for k, cert in enumerate(branch.certificates, 1):
                details.append(("certificate.%s.%d" % (branch.name, k),
                                str(cert)))
    return details


@_check("integrability", "structure",
        "Existence of an involutive isotropic extension: the span of L "
        "together with at least one of the two frame lines closes under "
        "the (optionally twisted) bracket.  Obstruction certificates "
        "are exact coefficients that must vanish.",
        allowed=("twist", "expect"))
def _run_integrability(scn, target, params, point_filter):
    return _integrability(scn, target, params, "integrable")


@_check("strong_integrability", "structure",
        "Both isotropic extensions of L close under the (optionally "
        "twisted) bracket; certificates are the exact coefficients "
        "whose vanishing is equivalent to involutivity.",
        allowed=("twist", "expect"))
def _run_strong_integrability(scn, target, params, point_filter):
    return _integrability(scn, target, params, "strong")


def _integrability(scn, target, params, mode):
    structure = scn.resolve_structure(target)
    twist = _twist_for(scn, structure, params)
    verdict = integrability_check(structure.pair, mode=mode, twist=twist)
    expect = _expect(params, "expect", "holds", ("holds", "fails"))
    ok = verdict.ok == (expect == "holds")
    details = _integrability_details(verdict)
    details.insert(0, ("expected", expect))
    return ("PASS" if ok else "FAIL"), details


@_check("normality", "structure",
        "The three conditions for a normal structure: vanishing torsion "
        "of the endomorphism on the frame-orthogonal complement, "
        "endomorphism compatibility with bracketing by the frame "
        "sections, and a vanishing frame bracket.  Residuals are exact "
        "coefficients.",
        allowed=("twist", "expect"))
def _run_normality(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    twist = _twist_for(scn, structure, params)
    verdict = normality_check(structure.triple, twist=twist)
    expect = _expect(params, "expect", "normal", ("normal", "not-normal"))
    ok = verdict.is_normal == (expect == "normal")
    details = [("expected", expect),
               ("identities-checked", str(verdict.checked))]
    for label, residuals in verdict.failures:
        for k, residual in enumerate(residuals, 1):
            details.append(("residual.%s.%d" % (label, k), str(residual)))
    return ("PASS" if ok else "FAIL"), details


@_check("normal_frame", "structure",
        "Search for a scalar potential whose pairing-dual differential, "
        "projected against the frame, reproduces the frame bracket.  "
        "Holds with a witness, fails with a refutation certificate, or "
        "reports an inconclusive search.",
        allowed=("twist", "expect"))
def _run_normal_frame(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    twist = _twist_for(scn, structure, params)
    verdict = normal_frame_criterion(structure.pair, twist=twist)
    details = []
    if verdict.witness is not None:
        details.append(("witness", str(verdict.witness)))
    if verdict.certificate is not None:
        details.append(("certificate", str(verdict.certificate)))
    if verdict.reason:
        details.append(("reason", verdict.reason))
    if not verdict.conclusive:
        return "INCONCLUSIVE", details
    expect = _expect(params, "expect", "holds", ("holds", "fails"))
    ok = verdict.status == expect
    details.insert(0, ("expected", expect))
    details.insert(1, ("status", verdict.status))
    return ("PASS" if ok else "FAIL"), details


@_check("recognizer_agreement", "structure",
        "The normality conditions and the frame-potential criterion "
        "must agree wherever the latter is conclusive.",
        allowed=("twist",))
def _run_recognizer_agreement(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    twist = _twist_for(scn, structure, params)
    nv = normality_check(structure.triple, twist=twist)
    nf = normal_frame_criterion(structure.pair, twist=twist)
    details = [("normality", "normal" if nv.is_normal else "not-normal"),
               ("frame-criterion", nf.status)]
    if not nf.conclusive:
        details.append(("reason", nf.reason))
        return "INCONCLUSIVE", details
    ok = (nf.status == "holds") == nv.is_normal
    if not ok:
        for label, residuals in nv.failures:
            for k, residual in enumerate(residuals, 1):
                details.append(("residual.%s.%d" % (label, k), str(residual)))
        if nf.certificate is not None:
            details.append(("certificate", str(nf.certificate)))
    return ("PASS" if ok else "FAIL"), details


@_check("geometric_type", "structure",
        "The pointwise pair (p, t): anchor rank of the frame plane and "
        "corank of the anchor image of L, computed exactly at every "
        "sample point.  With expect=(p,t);(p,t);... the computed list "
        "must match entry for entry.",
        allowed=("expect",))
def _run_geometric_type(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    types = geometric_type(structure.pair).pairs
    indices = _point_indices(structure.model, point_filter)
    details = [("point.%d" % i, "(%d,%d)" % types[i]) for i in indices]
    if "expect" in params:
        # one expected pair per model point; a point filter only narrows
        # which of them are compared
        wanted = _parse_type_list(params["expect"])
        if len(wanted) != len(structure.model.points):
            details.append(("expected-count", str(len(wanted))))
            return "FAIL", details
        for i in indices:
            if types[i] != wanted[i]:
                details.append(("mismatch-at", "point.%d" % i))
                details.append(("expected", "(%d,%d)" % wanted[i]))
                return "FAIL", details
    return "PASS", details


@_check("type_sum", "structure",
        "The balance 2t = type(rho1) + type(rho2) + 1 between the "
        "structure type and the two spinor types, at every sample "
        "point.")
def _run_type_sum(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    if structure.mixed_pair is None:
        return "INCONCLUSIVE", [("reason", "no spinor representative")]
    try:
        rows = type_sum_check(structure.mixed_pair, structure.pair)
    except StructureError as exc:
        return "FAIL", [("residual", str(exc))]
    indices = _point_indices(structure.model, point_filter)
    details = [("point.%d" % i, "t=%d rho-types=(%d,%d)" % rows[i])
               for i in indices]
    return "PASS", details


@_check("cone_algebra", "structure",
        "The cone lift at the given eigenvalue is an orthogonal "
        "square root of minus one (verified symbolically on all "
        "generators) and the type displacement between the structure "
        "and its cone lift stays in {0, 1}, with zero exactly when the "
        "second frame anchor lies in the anchor image of L.",
        allowed=("lam",))
def _run_cone_algebra(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    lam = Fraction(params.get("lam", "0"))
    try:
        quad = sekiya_from_triple(structure.triple, lam=lam)
        sekiya_to_cone(quad)
        rows = cone_type_bounds(structure.pair, structure.triple)
    except ValueError as exc:
        # covers both structural failures and eigenvalues whose cone
        # scale is irrational
        return "FAIL", [("residual", str(exc))]
    indices = _point_indices(structure.model, point_filter)
    details = [("eigenvalue", str(lam))]
    details.extend(
        ("point.%d" % i,
         "t=%d cone-t=%d anchor-in-image=%s"
         % (rows[i][0], rows[i][1], "yes" if rows[i][2] else "no"))
        for i in indices)
    return "PASS", details


@_check("sekiya_roundtrip", "structure",
        "Shearing the endomorphism to an eigenvalue and back is the "
        "identity, and extracting the quadruple from its cone lift "
        "returns it unchanged.",
        allowed=("lam",))
def _run_sekiya_roundtrip(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    lam = Fraction(params.get("lam", "0"))
    details = [("eigenvalue", str(lam))]
    try:
        quad = sekiya_from_triple(structure.triple, lam=lam)
        back = triple_from_sekiya(quad)
        flat_ok = (back.phi == structure.triple.phi
                   and back.e1 == structure.triple.e1
                   and back.e2 == structure.triple.e2)
        cone_ok = cone_to_sekiya(sekiya_to_cone(quad)) == quad
    except ValueError as exc:
        return "FAIL", details + [("residual", str(exc))]
    details.append(("shear-roundtrip", "identity" if flat_ok else "drifts"))
    details.append(("cone-roundtrip", "identity" if cone_ok else "drifts"))
    return ("PASS" if flat_ok and cone_ok else "FAIL"), details


@_check("mixed_integrability", "structure",
        "Solvability of the spinor derivative equations: the twisted "
        "differential of each spinor must be the Clifford action of "
        "some section on it.  Witness sections or refutation "
        "certificates are reported.",
        allowed=("twist", "mode", "expect"))
def _run_mixed_integrability(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    if structure.mixed_pair is None:
        return "INCONCLUSIVE", [("reason", "no spinor representative")]
    twist = _twist_for(scn, structure, params)
    mode = _expect(params, "mode", "strong", ("strong", "integrable"))
    verdict = mixed_pair_integrability(structure.mixed_pair, mode=mode,
                                       twist=twist)
    expect = _expect(params, "expect", "holds", ("holds", "fails"))
    ok = verdict.ok == (expect == "holds")
    details = [("expected", expect), ("mode", mode)]
    for report in verdict.reports:
        if report.solvable:
            details.append(("witness.rho%d" % report.index,
                            str(report.witness)))
        else:
            details.append(("certificate.rho%d" % report.index,
                            str(report.certificate)))
    return ("PASS" if ok else "FAIL"), details


@_check("poon_wade", "structure",
        "Whether the frame plane splits into a purely tangent line and "
        "a purely cotangent line; witnesses are printed when it does.",
        allowed=("expect",))
def _run_poon_wade(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    result = is_poon_wade(structure.pair)
    expect = _expect(params, "expect", "true", ("true", "false"))
    ok = bool(result) == (expect == "true")
    details = [("expected", expect),
               ("splits", "yes" if result else "no")]
    if result.holds:
        details.append(("vector-witness", str(result.vector_witness)))
        details.append(("form-witness", str(result.form_witness)))
    return ("PASS" if ok else "FAIL"), details


@_check("poon_wade_reduce", "structure",
        "Find a gauge 2-form whose exponential action moves the first "
        "frame section into the tangent bundle; verified symbolically "
        "on the transformed section.",
        allowed=("mode",))
def _run_poon_wade_reduce(scn, target, params, point_filter):
    structure = scn.resolve_structure(target)
    mode = params.get("mode", "general")
    try:
        result = poon_wade_reduce(structure.pair, mode=mode)
    except StructureError as exc:
        return "FAIL", [("residual", str(exc))]
    details = [("mode", mode), ("gauge", str(result.omega))]
    residual = [c for c in result.pair.e1.form if c]
    if residual:
        details.append(("residual", ", ".join(str(c) for c in residual)))
        return "FAIL", details
    details.append(("transformed-e1", str(result.pair.e1)))
    for note in result.notes:
        details.append(("note", note))
    return "PASS", details


@_check("duality_intertwiner", "dualpair",
        "The section transport preserves the pairing on all generators, "
        "intertwines the twisted brackets on fiber-invariant "
        "generators, and intertwines the Clifford action on forms up "
        "to one global sign.")
def _run_duality_intertwiner(scn, target, params, point_filter):
    setup = scn.resolve_dualpair(target)
    report = intertwiner_check(setup)
    details = [("line.%d" % k, line)
               for k, line in enumerate(report.lines, 1)]
    return ("PASS" if report.ok else "FAIL"), details


@_check("type_change", "dualpair",
        "Pointwise type bookkeeping across the dualization: the "
        "structure type moves by j1 + j2 - 1 and each spinor type by "
        "2j - 1, where j counts the power of the exchange form needed "
        "to reach a fiber component.  With anchor=assert the anchor "
        "projection rule is also required to hold.",
        allowed=("anchor",))
def _run_type_change(scn, target, params, point_filter):
    setup = scn.resolve_dualpair(target)
    carried, dual = scn.pair_structures[target]
    report = type_change_report(setup, carried, dual)
    indices = _point_indices(setup.source, point_filter)
    details = [("row.%d" % i, report.rows[i].line()) for i in indices]
    details.append(("displacement-rule", "PASS" if report.ok else "FAIL"))
    details.append(("anchor-rule",
                    "PASS" if report.anchor_rule_ok else "FAIL"))
    ok = report.ok
    if params.get("anchor") == "assert":
        ok = ok and report.anchor_rule_ok
    return ("PASS" if ok else "FAIL"), details


@_check("double_duality", "dualpair",
        "Dualizing twice returns sections fiber-reflected and forms "
        "fiber-reflected and scaled by the coefficient; the carried "
        "structure round-trips the same way.")
def _run_double_duality(scn, target, params, point_filter):
    setup = scn.resolve_dualpair(target)
    carried, _ = scn.pair_structures[target]
    report = double_duality_check(setup, structure=carried)
    details = [("line.%d" % k, line)
               for k, line in enumerate(report.lines, 1)]
    return ("PASS" if report.ok else "FAIL"), details


# ---------------------------------------------------------------------------
# execution and reporting


class CheckResult:
    __slots__ = ("index", "name", "target", "verdict", "details")

    def __init__(self, index, name, target, verdict, details):
        self.index = index
        self.name = name
        self.target = target
        self.verdict = verdict
        self.details = list(details)


class Report:
    """Deterministic run summary; renders human and machine text."""

    def __init__(self, scenario_name, results, strict):
        self.scenario_name = scenario_name
        self.results = list(results)
        self.strict = strict

    @property
    def counts(self):
        passed = sum(1 for r in self.results if r.verdict == "PASS")
        failed = sum(1 for r in self.results if r.verdict == "FAIL")
        inconclusive = sum(1 for r in self.results
                           if r.verdict == "INCONCLUSIVE")
        return passed, failed, inconclusive

    @property
    def status(self):
        passed, failed, inconclusive = self.counts
        if failed:
            return 1
        if inconclusive and self.strict:
            return 3
        return 0

    def human_text(self):
        lines = ["scenario: %s" % self.scenario_name]
        for result in self.results:
            lines.append("check %s %s: %s"
                         % (result.name, result.target, result.verdict))
            for key, value in result.details:
                lines.append("  %s: %s" % (key, value))
        passed, failed, inconclusive = self.counts
        lines.append("summary: %d checks, %d passed, %d failed, "
                     "%d inconclusive"
                     % (len(self.results), passed, failed, inconclusive))
        return "\n".join(lines) + "\n"

    def machine_text(self):
        lines = ["report.scenario = %s" % self.scenario_name,
                 "report.checks = %d" % len(self.results)]
        passed, failed, inconclusive = self.counts
        lines.append("report.passed = %d" % passed)
        lines.append("report.failed = %d" % failed)
        lines.append("report.inconclusive = %d" % inconclusive)
        for result in self.results:
            lines.append("")
            lines.append("check.index = %d" % result.index)
            lines.append("check.name = %s" % result.name)
            lines.append("check.target = %s" % result.target)
            lines.append("check.verdict = %s" % result.verdict)
            for key, value in result.details:
                lines.append("check.detail.%s = %s" % (key, value))
        return "\n".join(lines) + "\n"


def run_checks(scn: Scenario, strict=False, point_filter=None) -> Report:
    results = []
    for index, spec in enumerate(scn.checks, 1):
        definition = _CHECKS[spec.name]
        verdict, details = definition.fn(scn, spec.target, spec.params,
                                         point_filter)
        results.append(CheckResult(index, spec.name, spec.target,
                                   verdict, details))
    return Report(scn.name, results, strict)


# ---------------------------------------------------------------------------
# shipped scenarios and the catalog


def scenario_names():
    out = []
    for entry in resources.files(__package__).joinpath("scenarios").iterdir():
        if entry.name.endswith(".scn"):
            out.append(entry.name[:-4])
    return sorted(out)


def shipped_scenario_text(name):
    path = resources.files(__package__).joinpath("scenarios",
                                                 name + ".scn")
    if not path.is_file():
        raise ScenarioError("unknown shipped scenario %r; available: %s"
                            % (name, ", ".join(scenario_names())))
    return path.read_text(encoding="utf-8")


def load_scenario(ref) -> Scenario:
    """A scenario from a file path or a shipped scenario name."""
    import os
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as handle:
            text = handle.read()
        name = os.path.splitext(os.path.basename(ref))[0]
        scn = parse_scenario_text(text, source_name=os.path.basename(ref))
    else:
        text = shipped_scenario_text(ref)
        scn = parse_scenario_text(text, source_name=ref + ".scn")
        name = ref
    if scn.name == scn.source_name:
        scn.name = name
    return scn


_MODEL_NOTES = {
    "s3": "round three-sphere frame with polynomial coordinate scalars",
    "s3_formal": "three-sphere frame over formal scalars and derivatives",
    "hopf_s3": "three-sphere frame with fiber-invariant formal scalars",
    "torus3": "flat three-torus, constant scalars",
    "torus5": "flat five-torus, constant scalars",
    "heisenberg": "compact nilmanifold quotient, one nonclosed coframe",
    "triple7": "seven-dimensional algebraic fiber model, one constant",
    "hopf_dual": "circle dual of the invariant three-sphere presentation",
    "heis_dual": "circle dual of the nilmanifold presentation",
}

_BUILDER_NOTES = {
    "s3-family": "sphere structures from a scalar pair or a holomorphic "
                 "expression; formal and twisted variants",
    "hopf-family": "the fiber-invariant sphere subfamily, dualizable",
    "cosymplectic": "2-form/1-form structure on the flat torus or any "
                    "named model",
    "almost-contact": "tangent endomorphism structure on the flat torus",
    "product": "five-dimensional product structure on the flat torus",
    "heisenberg": "two-parameter family on the nilmanifold quotient",
    "deformation": "graph deformation of a base example's isotropic bundle",
    "triple-contact-7d": "four-member family on the seven-dimensional model",
}

_PAIR_NOTES = {
    "hopf": "invariant sphere family against its flat dual, curvature "
            "traded for the dual twist",
    "heisenberg": "nilmanifold family against the flat torus with twist",
    "trivial-circle": "flat torus direction dualized to itself",
}


def catalog_lines():
    """The list command's body: every addressable name, one per line."""
    lines = ["models:"]
    for name in list_models():
        lines.append("  %s - %s" % (name, _MODEL_NOTES.get(name, "")))
    lines.append("structures:")
    for name in example_names():
        lines.append("  %s - %s" % (name, _BUILDER_NOTES.get(name, "")))
    lines.append("dual pairs:")
    for name in duality_names():
        lines.append("  %s - %s" % (name, _PAIR_NOTES.get(name, "")))
    lines.append("scenarios:")
    for name in scenario_names():
        lines.append("  %s" % name)
    lines.append("checks:")
    for name in check_names():
        lines.append("  %s" % name)
    return lines
