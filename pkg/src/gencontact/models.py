"""Loading frame models from their line-oriented description files.

A model file declares, in order: the scalar generators (with optional
``formal`` and ``constant`` markers), reduction relations, the frame and
coframe names, the Lie structure lines, the coframe differentials, the
derivation tables, sample points, and optional ``check`` lines that the
loader replays after validation.  Unmentioned structure entries are zero.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .ring import ScalarContext, ParseError
from .frame import FrameModel, ModelValidationError, dorfman, parse_section


_KEYWORDS = ("model", "gens", "formal", "constant", "relation", "frame",
             "coframe", "lie", "dcof", "derivation", "point", "check")


def _split_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _relation_head(text):
    parts = text.split("^")
    if len(parts) != 2 or not parts[1].strip().isdigit():
        raise ParseError("relation head must look like name^power")
    return parts[0].strip(), int(parts[1].strip())


def parse_model_text(text: str, source_name="<model>") -> FrameModel:
    groups = {key: [] for key in _KEYWORDS}
    for line in _split_lines(text):
        key = line.split(None, 1)[0]
        if key not in groups:
            raise ParseError("%s: unknown directive %r" % (source_name, key))
        rest = line[len(key):].strip()
        groups[key].append(rest)

    if len(groups["model"]) != 1:
        raise ParseError("%s: expected exactly one model line" % source_name)
    name = groups["model"][0]

    gens = []
    for chunk in groups["gens"]:
        gens.extend(chunk.split())
    formal = []
    for chunk in groups["formal"]:
        formal.extend(chunk.split())
    constants = []
    for chunk in groups["constant"]:
        constants.extend(chunk.split())
    ctx = ScalarContext(gens, constants=constants, formal=formal)

    for line in groups["relation"]:
        if "=" not in line:
            raise ParseError("relation line needs an equality")
        head, tail = line.split("=", 1)
        lead, power = _relation_head(head)
        ctx.add_relation(lead, power, ctx.parse(tail))

    for line in groups["derivation"]:
        if ":" not in line:
            raise ParseError("derivation line needs a colon")
        dname, table_text = line.split(":", 1)
        dname = dname.strip()
        images = {}
        for entry in table_text.split(","):
            entry = entry.strip()
            if not entry:
                continue
            if "->" not in entry:
                raise ParseError("derivation entry needs an arrow: %r" % entry)
            gen, image = entry.split("->", 1)
            images[gen.strip()] = ctx.parse(image)
        ctx.add_derivation(dname, images)

    if len(groups["frame"]) != 1 or len(groups["coframe"]) != 1:
        raise ParseError("%s: expected one frame and one coframe line" % source_name)
    frame_names = tuple(groups["frame"][0].split())
    coframe_names = tuple(groups["coframe"][0].split())
    dim = len(frame_names)

    points = []
    for line in groups["point"]:
        point = {}
        for assign in line.split():
            if "=" not in assign:
                raise ParseError("point entry needs name=value: %r" % assign)
            pname, value = assign.split("=", 1)
            point[pname] = Fraction(value)
        points.append(point)

    derivation_names = tuple(n if n in ctx.derivations else None
                             for n in frame_names)
    zero = ctx.zero()
    structure = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
    model = FrameModel(name, ctx, frame_names, coframe_names, structure,
                       [None] * dim, derivation_names, [], validate=False)

    for line in groups["lie"]:
        if "=" not in line:
            raise ParseError("lie line needs an equality")
        head, rhs = line.split("=", 1)
        parts = head.split()
        if len(parts) != 2:
            raise ParseError("lie head must name two frame directions")
        a = model.frame_index[parts[0]]
        b = model.frame_index[parts[1]]
        if a == b:
            raise ParseError("lie head repeats a direction")
        rhs = rhs.strip()
        section = model.zero_section() if rhs == "0" else parse_section(model, rhs)
        if not section.vector_only():
            raise ParseError("lie bracket values must be vector fields")
        structure[a][b] = list(section.vec)
        structure[b][a] = [-c for c in section.vec]
    model.structure = tuple(tuple(tuple(row) for row in block)
                            for block in structure)

    d_table = {}
    for line in groups["dcof"]:
        if "=" not in line:
            raise ParseError("dcof line needs an equality")
        head, rhs = line.split("=", 1)
        cof = head.strip()
        if cof not in model.coframe_index:
            raise ParseError("unknown coframe name %r" % cof)
        d_table[model.coframe_index[cof]] = model.form(rhs)
    model.d_coframe_table = tuple(
        d_table.get(a, model.zero_form()) for a in range(dim))

    model.points = tuple(points)
    model._validate()

    for line in groups["check"]:
        _run_check(model, line)
    return model


def _run_check(model, line):
    parts = line.split(None, 3)
    if len(parts) != 4 or parts[0] != "dorfman":
        raise ParseError("unsupported check line: %r" % line)
    _, left, right, rest = parts
    if not rest.startswith("="):
        raise ParseError("check line needs an equality: %r" % line)
    expected_text = rest[1:].strip()
    x = parse_section(model, left)
    y = parse_section(model, right)
    expected = model.zero_section() if expected_text == "0" \
        else parse_section(model, expected_text)
    got = dorfman(x, y)
    if got != expected:
        raise ModelValidationError(
            "declared bracket check failed: [%s,%s] = %s, expected %s"
            % (left, right, got, expected))


_FILES = {
    "s3": "s3.model",
    "s3_formal": "s3_formal.model",
    "hopf_s3": "hopf_s3.model",
    "torus3": "torus3.model",
    "torus5": "torus5.model",
    "heisenberg": "heisenberg.model",
    "triple7": "triple7.model",
    "hopf_dual": "hopf_dual.model",
    "heis_dual": "heis_dual.model",
}

_CACHE = {}


def builtin_model(name: str) -> FrameModel:
    """The shared singleton instance of a packaged model."""
    if name not in _FILES:
        raise KeyError("unknown builtin model %r" % (name,))
    if name not in _CACHE:
        text = resources.files("gencontact").joinpath(
            "models", _FILES[name]).read_text(encoding="utf-8")
        model = parse_model_text(text, source_name=_FILES[name])
        if model.name != name:
            raise ModelValidationError(
                "file %s declares model %r" % (_FILES[name], model.name))
        _CACHE[name] = model
    return _CACHE[name]


def list_models():
    return sorted(_FILES)
