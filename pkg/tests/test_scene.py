import pytest
from hypothesis import given, settings, strategies as st

from eulerplane import planemap as pm
from eulerplane.errors import BadParameter, SceneSyntaxError, UndeclaredGenerator, UnknownPrimitive
from eulerplane.scene import (
    build_action,
    build_primitives,
    format_word,
    parse_scene,
    parse_word,
    print_scene,
    strip_positions,
    _word_to_expr,
)

MINIMAL = """euler-plane-scene 1
[group]
genus = 1
[recipe]
name = bestvina
n = 2
[method]
name = lift
"""

CUSTOM = """euler-plane-scene 1
# Bestvina's action, spelled out
[group]
genus = 1
[primitives]
t = twist center=(0,0) r_in=0.9 r_out=1.1 k=2
b = dilation factor=2
a = conjproduct core=t conjugator=b indices=all
[generators]
a1 = a
b1 = b
[method]
name = lift
lift = puncture
"""


def test_minimal_scene_parses():
    s = parse_scene(MINIMAL)
    assert s.genus == 1 and s.recipe == "bestvina" and s.recipe_params == {"n": 2}
    assert s.method["name"] == "lift"


def test_method_defaults_to_all():
    s = parse_scene("euler-plane-scene 1\n[group]\ngenus = 1\n[recipe]\nname = torus_shear\n")
    assert s.method["name"] == "all"


def test_word_grammar():
    node = parse_word("b^2 * t * b^-2")
    assert strip_positions(node) == ("seq", (("pow", ("name", "b"), 2), ("name", "t"),
                                             ("pow", ("name", "b"), -2)))
    prims = {"b": pm.Dilation(2.0), "t": pm.make_annulus_twist((0, 0), 0.9, 1.1, 1)}
    e = _word_to_expr(node, prims)
    assert isinstance(e, pm.Compose)
    assert [type(x).__name__ for x in e.parts] == ["Power", "AnnulusTwist", "Power"]
    assert e.parts[0].k == 2 and e.parts[2].k == -2
    assert strip_positions(parse_word("(a * b)' * id")) == \
        ("seq", (("pow", ("seq", (("name", "a"), ("name", "b"))), -1), ("id",)))


@settings(max_examples=60, deadline=None)
@given(st.recursive(
    st.sampled_from(["a", "b", "t", "id"]),
    lambda ch: st.one_of(
        st.tuples(ch, st.integers(-3, 3)).map(lambda x: f"({x[0]})^{x[1]}"),
        st.lists(ch, min_size=2, max_size=3).map(" * ".join),
        ch.map(lambda w: f"({w})'")),
    max_leaves=6))
def test_word_round_trip(text):
    node = parse_word(text)
    again = parse_word(format_word(node))
    assert strip_positions(again) == strip_positions(node)


def test_scene_round_trip():
    for text in (MINIMAL, CUSTOM):
        s = parse_scene(text)
        printed = print_scene(s)
        assert parse_scene(printed) == s
        assert print_scene(parse_scene(printed)) == printed


def test_custom_scene_builds_bestvina():
    from eulerplane import euler
    action = build_action(parse_scene(CUSTOM))
    assert euler.euler_via_lift(action).value == 2
    prims = build_primitives(parse_scene(CUSTOM))
    assert isinstance(prims["a"], pm.ConjProduct)


def test_undeclared_generator_position():
    bad = CUSTOM.replace("a1 = a", "a1 = b * q")
    with pytest.raises(UndeclaredGenerator) as exc:
        parse_scene(bad)
    line = bad.splitlines().index("a1 = b * q") + 1
    assert exc.value.line == line and exc.value.column == 10


def test_unknown_primitive_kind():
    bad = CUSTOM.replace("b = dilation", "b = squish")
    with pytest.raises(UnknownPrimitive) as exc:
        parse_scene(bad)
    assert exc.value.line == 7


def test_bad_parameter_and_syntax():
    with pytest.raises(BadParameter):
        parse_scene(MINIMAL.replace("genus = 1", "genus = one"))
    with pytest.raises(SceneSyntaxError):
        parse_scene(MINIMAL.replace("euler-plane-scene 1", "scene"))
    with pytest.raises(SceneSyntaxError):
        parse_scene(CUSTOM.replace("a1 = a", "a1 = (a"))
    with pytest.raises(BadParameter):
        parse_scene(CUSTOM.replace("k=2", "k=2 colour=red"))


def test_unknown_method_key_rejected():
    with pytest.raises(BadParameter):
        parse_scene(MINIMAL + "colour = 3\n")
