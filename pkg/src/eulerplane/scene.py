"""Scene files: a small line-oriented format describing an action and what to compute.

Example::

    euler-plane-scene 1
    # Bestvina's action with twist power 2
    [group]
    genus = 1
    [recipe]
    name = bestvina
    n = 2
    [method]
    name = lift

Instead of ``[recipe]`` a scene may declare ``[primitives]`` and
``[generators]``; generator words use ``*`` for composition (right to left),
``^k`` for powers, a trailing ``'`` for inverses, parentheses and ``id``::

    [primitives]
    t = twist center=(0,0) r_in=0.9 r_out=1.1 k=1
    b = dilation factor=2
    a = conjproduct core=t conjugator=b indices=all
    [generators]
    a1 = a
    b1 = b
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import BadParameter, SceneSyntaxError, UndeclaredGenerator, UnknownPrimitive

HEADER = "euler-plane-scene"
VERSION = 1
BLOCKS = ("group", "recipe", "primitives", "generators", "method", "output")

PRIMITIVE_KEYS = {
    "translation": {"vector": "point"},
    "dilation": {"factor": "float", "center": "point"},
    "rotation": {"angle": "float", "center": "point"},
    "twist": {"center": "point", "r_in": "float", "r_out": "float", "k": "int"},
    "diskrotation": {"center": "point", "r_in": "float", "r_out": "float", "angle": "float"},
    "step": {"shift": "point", "x_lo": "float", "x_hi": "float"},
    "shear": {"y_lo": "float", "y_hi": "float", "amplitude": "float"},
    "conjproduct": {"core": "name", "conjugator": "name", "indices": "name"},
}
REQUIRED = {
    "translation": {"vector"}, "dilation": {"factor"}, "rotation": {"angle"},
    "twist": {"center", "r_in", "r_out", "k"}, "diskrotation": {"center", "r_in", "r_out", "angle"},
    "step": {"shift", "x_lo", "x_hi"}, "shear": {"y_lo", "y_hi", "amplitude"},
    "conjproduct": {"core", "conjugator"},
}
METHOD_KEYS = {"name": "name", "N": "int", "n": "int", "R": "float", "seed": "int",
               "point": "point", "z0": "point", "lift": "name", "center": "point",
               "tau_height": "float", "tol": "float"}
OUTPUT_KEYS = {"report": "text", "svg": "text"}
METHOD_NAMES = ("lift", "graphical", "signed-sum", "writhe-diff", "all")


# ---------------------------------------------------------------------------
# values

@dataclass(frozen=True)
class Located:
    value: object
    line: int
    column: int


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_POINT = re.compile(rf"^\(\s*({_NUM})\s*,\s*({_NUM})\s*\)$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _parse_value(text, kind, line, col, key):
    text = text.strip()
    try:
        if kind == "int":
            if not re.fullmatch(r"[-+]?\d+", text):
                raise ValueError
            return int(text)
        if kind == "float":
            v = float(text)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "point":
            m = _POINT.match(text)
            if not m:
                raise ValueError
            return (float(m.group(1)), float(m.group(2)))
        if kind == "name":
            if not _NAME.match(text) and text not in METHOD_NAMES:
                raise ValueError
            return text
        if kind == "text":
            if not text:
                raise ValueError
            return text
    except ValueError:
        raise BadParameter(f"bad value {text!r} for {key}", line, col, kind) from None
    raise BadParameter(f"unknown value kind {kind}", line, col)


def _guess_value(text, line, col, key):
    text = text.strip()
    for kind in ("int", "float", "point", "name"):
        try:
            return _parse_value(text, kind, line, col, key)
        except BadParameter:
            continue
    raise BadParameter(f"cannot read value {text!r} for {key}", line, col,
                       "integer, number, (x, y) or name")


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return f"({format_value(float(v[0]))}, {format_value(float(v[1]))})"
    return str(v)


# ---------------------------------------------------------------------------
# words

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[-+]?\d+)|(?P<op>[*^'()]))")


def _tokenize(text, line, col0):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SceneSyntaxError(f"unexpected character {text[pos:].strip()[0]!r} in word",
                                   line, col0 + pos, "name, integer, *, ^, ', ( or )")
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start))
        pos = m.end()
    return out


class _WordParser:
    def __init__(self, tokens, line, end_col):
        self.t = tokens
        self.i = 0
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def fail(self, msg, hint):
        tok = self.peek()
        col = tok[2] if tok else self.end_col
        raise SceneSyntaxError(msg, self.line, col, hint)

    def word(self):
        items = [self.factor()]
        while self.peek() and self.peek()[1] == "*":
            self.i += 1
            items.append(self.factor())
        return items[0] if len(items) == 1 else ("seq", tuple(items))

    def factor(self):
        node = self.atom()
        while self.peek() and self.peek()[1] in ("^", "'"):
            op = self.peek()[1]
            self.i += 1
            if op == "'":
                node = ("pow", node, -1)
            else:
                tok = self.peek()
                if tok is None or tok[0] != "int":
                    self.fail("exponent must be an integer", "integer after ^")
                self.i += 1
                node = ("pow", node, int(tok[1]))
        return node

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.fail("word ends too early", "name, id or (")
        if tok[1] == "(":
            self.i += 1
            node = self.word()
            if not self.peek() or self.peek()[1] != ")":
                self.fail("missing closing parenthesis", ")")
            self.i += 1
            return node
        if tok[0] == "name":
            self.i += 1
            if tok[1] == "id":
                return ("id",)
            return ("name", tok[1], self.line, tok[2])
        self.fail(f"unexpected {tok[1]!r}", "name, id or (")


def parse_word(text: str, line: int = 1, col0: int = 1):
    tokens = _tokenize(text, line, col0)
    p = _WordParser(tokens, line, col0 + len(text))
    node = p.word()
    if p.peek() is not None:
        p.fail(f"unexpected {p.peek()[1]!r} after word", "* or end of line")
    return node


def format_word(node) -> str:
    kind = node[0]
    if kind == "id":
        return "id"
    if kind == "name":
        return node[1]
    if kind == "seq":
        return " * ".join(_format_factor(x) for x in node[1])
    return _format_factor(node)


def _format_factor(node):
    if node[0] == "pow":
        inner = node[1]
        base = format_word(inner) if inner[0] in ("name", "id") else f"({format_word(inner)})"
        return f"{base}^{node[2]}"
    if node[0] == "seq":
        return f"({format_word(node)})"
    return format_word(node)


def strip_positions(node):
    """Word tree without source positions, for comparisons."""
    kind = node[0]
    if kind == "name":
        return ("name", node[1])
    if kind == "pow":
        return ("pow", strip_positions(node[1]), node[2])
    if kind == "seq":
        return ("seq", tuple(strip_positions(x) for x in node[1]))
    return node


def word_names(node):
    kind = node[0]
    if kind == "name":
        yield node
    elif kind == "pow":
        yield from word_names(node[1])
    elif kind == "seq":
        for x in node[1]:
            yield from word_names(x)


# ---------------------------------------------------------------------------
# scene

@dataclass
class SceneFile:
    version: int = VERSION
    genus: int = 1
    recipe: str | None = None
    recipe_params: dict = field(default_factory=dict)
    primitives: dict = field(default_factory=dict)   # name -> (kind, params)
    generators: dict = field(default_factory=dict)   # name -> word tree
    method: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def canonical(self):
        """Comparable content, free of source positions."""
        return (self.version, self.genus, self.recipe, tuple(sorted(self.recipe_params.items())),
                tuple((k, v[0], tuple(sorted(v[1].items()))) for k, v in self.primitives.items()),
                tuple((k, strip_positions(w)) for k, w in self.generators.items()),
                tuple(sorted(self.method.items())), tuple(sorted(self.output.items())))

    def __eq__(self, other):
        return isinstance(other, SceneFile) and self.canonical() == other.canonical()


def _split_kv(body, line, col):
    if "=" not in body:
        raise SceneSyntaxError("missing '='", line, col + len(body), "key = value")
    k, v = body.split("=", 1)
    key = k.strip()
    if not _NAME.match(key):
        raise SceneSyntaxError(f"bad key {key!r}", line, col, "identifier")
    vcol = col + len(k) + 1 + (len(v) - len(v.lstrip()))
    return key, v.strip(), vcol


def _primitive(name, body, line, col, declared):
    parts = body.split(None, 1)
    kind = parts[0]
    if kind not in PRIMITIVE_KEYS:
        raise UnknownPrimitive(f"unknown primitive kind {kind!r}", line, col,
                               ", ".join(sorted(PRIMITIVE_KEYS)))
    rest = parts[1] if len(parts) > 1 else ""
    params = {}
    rcol = col + len(kind) + (len(body) - len(kind) - len(rest))
    for m in re.finditer(r"([A-Za-z_]\w*)\s*=\s*(\([^)]*\)|\S+)", rest):
        key, raw = m.group(1), m.group(2)
        kcol = rcol + m.start(1)
        if key not in PRIMITIVE_KEYS[kind]:
            raise BadParameter(f"unknown key {key!r} for {kind}", line, kcol,
                               ", ".join(sorted(PRIMITIVE_KEYS[kind])))
        val = _parse_value(raw, PRIMITIVE_KEYS[kind][key], line, rcol + m.start(2), key)
        if PRIMITIVE_KEYS[kind][key] == "name" and key in ("core", "conjugator") and val not in declared:
            raise UndeclaredGenerator(f"{val!r} is not a declared primitive", line, rcol + m.start(2))
        if key == "indices" and val not in ("all", "nonnegative"):
            raise BadParameter(f"bad indices {val!r}", line, rcol + m.start(2), "all or nonnegative")
        params[key] = val
    leftover = re.sub(r"([A-Za-z_]\w*)\s*=\s*(\([^)]*\)|\S+)", "", rest).strip()
    if leftover:
        raise SceneSyntaxError(f"cannot read {leftover!r}", line, rcol + rest.find(leftover), "key=value")
    missing = REQUIRED[kind] - set(params)
    if missing:
        raise BadParameter(f"{kind} needs {sorted(missing)}", line, col)
    return kind, params


def parse_scene(text: str) -> SceneFile:
    """Parse scene text; the first problem raises with its line and column."""
    scene = SceneFile()
    block = None
    seen_header = False
    seen_blocks = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        col = len(stripped) - len(stripped.lstrip()) + 1
        body = stripped.strip()
        if not seen_header:
            parts = body.split()
            if len(parts) != 2 or parts[0] != HEADER:
                raise SceneSyntaxError("missing header", ln, col, f"'{HEADER} {VERSION}'")
            if parts[1] != str(VERSION):
                raise BadParameter(f"unsupported version {parts[1]}", ln, col + len(HEADER) + 1, str(VERSION))
            seen_header = True
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise SceneSyntaxError("unterminated block header", ln, col + len(body), "]")
            block = body[1:-1].strip()
            if block not in BLOCKS:
                raise SceneSyntaxError(f"unknown block [{block}]", ln, col, ", ".join(BLOCKS))
            if block in seen_blocks:
                raise SceneSyntaxError(f"block [{block}] repeated", ln, col)
            seen_blocks.add(block)
            continue
        if block is None:
            raise SceneSyntaxError("content before the first block", ln, col, "[block]")
        key, val, vcol = _split_kv(body, ln, col)
        if block == "group":
            if key != "genus":
                raise BadParameter(f"unknown key {key!r} in [group]", ln, col, "genus")
            scene.genus = _parse_value(val, "int", ln, vcol, key)
            if scene.genus < 1:
                raise BadParameter("genus must be at least 1", ln, vcol)
        elif block == "recipe":
            if key == "name":
                scene.recipe = _parse_value(val, "name", ln, vcol, key)
            else:
                scene.recipe_params[key] = _guess_value(val, ln, vcol, key)
        elif block == "primitives":
            if key in scene.primitives:
                raise BadParameter(f"primitive {key!r} declared twice", ln, col)
            scene.primitives[key] = _primitive(key, val, ln, vcol, scene.primitives)
        elif block == "generators":
            node = parse_word(val, ln, vcol)
            for nm in word_names(node):
                if nm[1] not in scene.primitives:
                    raise UndeclaredGenerator(f"{nm[1]!r} is not a declared primitive", nm[2], nm[3])
            scene.generators[key] = node
        elif block == "method":
            if key not in METHOD_KEYS:
                raise BadParameter(f"unknown key {key!r} in [method]", ln, col, ", ".join(METHOD_KEYS))
            v = _parse_value(val, METHOD_KEYS[key], ln, vcol, key)
            if key == "name" and v not in METHOD_NAMES:
                raise BadParameter(f"unknown method {v!r}", ln, vcol, ", ".join(METHOD_NAMES))
            if key == "lift" and v not in ("puncture", "infinity"):
                raise BadParameter(f"unknown lift mode {v!r}", ln, vcol, "puncture or infinity")
            scene.method[key] = v
        elif block == "output":
            if key not in OUTPUT_KEYS:
                raise BadParameter(f"unknown key {key!r} in [output]", ln, col, "report, svg")
            scene.output[key] = _parse_value(val, "text", ln, vcol, key)
    if not seen_header:
        raise SceneSyntaxError("empty scene", 1, 1, f"'{HEADER} {VERSION}'")
    if scene.recipe is None and not scene.generators:
        raise BadParameter("scene needs a [recipe] or [generators]", None, None)
    if scene.recipe is not None and scene.generators:
        raise BadParameter("scene has both a [recipe] and [generators]", None, None)
    if scene.generators:
        from .euler import generator_names
        want = generator_names(scene.genus)
        missing = [g for g in want if g not in scene.generators]
        extra = [g for g in scene.generators if g not in want]
        if missing or extra:
            raise BadParameter(f"generators must be exactly {want} (missing {missing}, extra {extra})",
                               None, None)
    scene.method.setdefault("name", "all")
    return scene


def print_scene(scene: SceneFile) -> str:
    """Canonical text; parse(print_scene(s)) == s."""
    out = [f"{HEADER} {scene.version}", "[group]", f"genus = {scene.genus}"]
    if scene.recipe is not None:
        out += ["[recipe]", f"name = {scene.recipe}"]
        out += [f"{k} = {format_value(v)}" for k, v in scene.recipe_params.items()]
    if scene.primitives:
        out.append("[primitives]")
        for name, (kind, params) in scene.primitives.items():
            args = " ".join(f"{k}={format_value(v).replace(' ', '')}" for k, v in params.items())
            out.append(f"{name} = {kind} {args}".rstrip())
    if scene.generators:
        out.append("[generators]")
        out += [f"{k} = {format_word(w)}" for k, w in scene.generators.items()]
    if scene.method:
        out.append("[method]")
        out += [f"{k} = {format_value(v)}" for k, v in scene.method.items()]
    if scene.output:
        out.append("[output]")
        out += [f"{k} = {v}" for k, v in scene.output.items()]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# building

def _word_to_expr(node, prims):
    from .planemap import Compose, Identity, Power
    kind = node[0]
    if kind == "id":
        return Identity()
    if kind == "name":
        return prims[node[1]]
    if kind == "pow":
        return Power(_word_to_expr(node[1], prims), node[2])
    return Compose(tuple(_word_to_expr(x, prims) for x in node[1]))


def build_primitives(scene: SceneFile) -> dict:
    from . import planemap as pm
    out = {}
    for name, (kind, p) in scene.primitives.items():
        c = p.get("center", (0.0, 0.0))
        if kind == "translation":
            out[name] = pm.Translation(p["vector"])
        elif kind == "dilation":
            out[name] = pm.Dilation(p["factor"], c)
        elif kind == "rotation":
            out[name] = pm.Rotation(p["angle"], c)
        elif kind == "twist":
            out[name] = pm.make_annulus_twist(c, p["r_in"], p["r_out"], p["k"])
        elif kind == "diskrotation":
            out[name] = pm.DiskRotation(c, p["r_in"], p["r_out"], p["angle"])
        elif kind == "step":
            out[name] = pm.make_step_translation(p["shift"], p["x_lo"], p["x_hi"])
        elif kind == "shear":
            out[name] = pm.StripShear(p["y_lo"], p["y_hi"], p["amplitude"])
        elif kind == "conjproduct":
            idx = pm.NONNEGATIVE if p.get("indices") == "nonnegative" else pm.ALL
            out[name] = pm.lazy_twist_product(out[p["core"]], out[p["conjugator"]], idx)
    return out


def build_action(scene: SceneFile):
    """PlanarAction described by the scene."""
    from . import zoo
    from .cover import LiftContext
    from .curve import bump_arc
    from .euler import PlanarAction
    m = scene.method
    if scene.recipe is not None:
        action = zoo.build(scene.recipe, **scene.recipe_params)
        if "R" in m and action.lift is not None and action.lift.mode == "infinity":
            R = float(m["R"])
            z0 = m.get("z0", (2 * R, R))
            action = _replace(action, lift=LiftContext("infinity", action.lift.center, R=R, z0=z0))
        if action.genus != scene.genus:
            raise BadParameter(f"recipe {scene.recipe} has genus {action.genus}, scene says {scene.genus}",
                               None, None)
        return action
    prims = build_primitives(scene)
    assignment = {g: _word_to_expr(w, prims) for g, w in scene.generators.items()}
    nonsmooth = tuple({tuple(q) for e in assignment.values() for q in e.nonsmooth_points()})
    lift = None
    if "lift" in m:
        center = m.get("center", (0.0, 0.0))
        if m["lift"] == "infinity":
            R = float(m.get("R", 60.0))
            lift = LiftContext("infinity", center, R=R, z0=m.get("z0", (2 * R + center[0], R + center[1])))
        else:
            lift = LiftContext("puncture", center, z0=m.get("z0", (center[0] + 1.5, center[1] + 0.3)),
                               fixed_by_construction=nonsmooth)
    p = m.get("point")
    tau = None
    if p is not None and scene.genus == 1:
        bp = assignment["b1"].apply([p])[0]
        tau = bump_arc(p, tuple(bp), float(m.get("tau_height", 0.5)))
    return PlanarAction(scene.genus, assignment, name="scene", nonsmooth=nonsmooth,
                        fixed_point=p, tau=tau, lift=lift, graphical_z0=m.get("z0", (0.3, 0.4)),
                        smooth=not nonsmooth)


def _replace(action, **kw):
    from dataclasses import replace
    return replace(action, **kw)
