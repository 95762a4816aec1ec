import math

import numpy as np
import pytest

from eulerplane import cover, planemap as pm, zoo
from eulerplane.cover import LiftContext, LiftedPoint, arg_continuation, lifted_apply
from eulerplane.curve import circle, concat, hermite_chain, segment
from eulerplane.errors import ForbiddenRegionViolated, NotARelator, PathHitsCenter
from eulerplane.euler import relator_word


def test_arg_along_circle_and_radial_segment():
    assert arg_continuation(circle(), 0.0) == pytest.approx(2 * math.pi)
    assert arg_continuation(segment((1, 1), (3, 3)), math.pi / 4) == pytest.approx(math.pi / 4)


def test_path_and_reverse_recover_angle():
    c = hermite_chain([(1, 0), (0, 2), (-1, -1)], [(0, 2), (-2, 0), (1, -1)])
    loop = concat([c, c.reversed()])
    assert abs(arg_continuation(loop, 0.0)) < 1e-9


def test_path_through_center_raises():
    with pytest.raises(PathHitsCenter):
        arg_continuation(segment((-1, 0), (1, 0)), math.pi)


PUNCTURE = LiftContext("puncture", (0.0, 0.0), z0=(1.0, 0.0))


def test_rotation_lift_adds_angle():
    out = lifted_apply(PUNCTURE, pm.Rotation(0.8), PUNCTURE.base)
    assert out.angle == pytest.approx(0.8)
    assert np.allclose(out.base, (math.cos(0.8), math.sin(0.8)))


def test_dilation_lift_keeps_angle():
    zt = LiftedPoint(np.array([0.0, 2.0]), math.pi / 2 + 2 * math.pi)
    out = lifted_apply(PUNCTURE, pm.Dilation(2.0), zt)
    assert out.angle == pytest.approx(zt.angle)
    assert np.allclose(out.base, (0.0, 4.0))


def test_lift_is_path_independent():
    g = zoo.bestvina(1)["a1"]
    ctx = zoo.bestvina(1).lift
    target = LiftedPoint(np.array([-0.5, 2.5]), math.atan2(2.5, -0.5))
    direct = lifted_apply(ctx, g, target)
    # a C1 detour in the same homotopy class, swinging below the puncture first
    z0 = np.asarray(ctx.z0)
    detour = hermite_chain([z0, (4.0, -2.0), (3.0, 3.0), target.base],
                           [(2.0, -2.0), (2.0, 2.0), (-3.0, 2.0), (-2.0, -1.0)])
    assert arg_continuation(detour, ctx.theta0) == pytest.approx(target.angle)
    other = lifted_apply(ctx, g, target, path=detour)
    assert np.allclose(direct.base, other.base, atol=1e-9)
    assert abs(direct.angle - other.angle) < 1e-9


def test_lift_respects_composition():
    action = zoo.bestvina(1)
    ctx = action.lift
    g, h = action["a1"], action["b1"]
    zt = LiftedPoint(np.array([2.0, 1.0]), math.atan2(1.0, 2.0))
    two_steps = lifted_apply(ctx, h, lifted_apply(ctx, g, zt))
    one_step = lifted_apply(ctx, pm.Compose((h, g)), zt)
    # lifts of h o g may differ from the product by a deck translation
    turns = (two_steps.angle - one_step.angle) / (2 * math.pi)
    assert abs(turns - round(turns)) < 1e-9
    assert np.allclose(two_steps.base, one_step.base, atol=1e-9)
    assert round(turns) == 0


def test_trivial_relator_words():
    action = zoo.bestvina(2)
    for name in ("a1", "b1"):
        assert cover.deck_translation(action.lift, [(name, 1), (name, -1)], action) == 0


def test_bestvina_commutator():
    action = zoo.bestvina(1)
    assert cover.deck_translation(action.lift, relator_word(1), action) == 1
    for n in (-2, 3):
        a = zoo.bestvina(n)
        assert cover.deck_translation(a.lift, relator_word(1), a) == n


def test_non_relator_raises():
    action = zoo.bestvina(1)
    with pytest.raises(NotARelator):
        cover.deck_translation(action.lift, [("b1", 1)], action)


def test_forbidden_region():
    action = zoo.genus2_smooth(1)
    small = LiftContext("infinity", (0.0, 0.0), R=0.5, z0=(1.0, 0.5))
    with pytest.raises(ForbiddenRegionViolated):
        cover.deck_translation(small, relator_word(2), action)


def _conjugate(word, name, e):
    return [(name, e)] + list(word) + [(name, -e)]


def test_conjugation_invariance():
    action = zoo.bestvina(2)
    rng = np.random.default_rng(3)
    base = relator_word(1)
    for _ in range(10):
        w = base
        for _ in range(int(rng.integers(1, 3))):
            w = _conjugate(w, str(rng.choice(["a1", "b1"])), int(rng.choice([-1, 1])))
        assert cover.deck_translation(action.lift, w, action) == 2


def test_additivity_of_relators():
    action = zoo.bestvina(1)
    w = relator_word(1)
    inv = [(n, -e) for n, e in reversed(w)]
    assert cover.deck_translation(action.lift, w + w, action) == 2
    assert cover.deck_translation(action.lift, w + inv, action) == 0
    assert cover.deck_translation(action.lift, inv, action) == -1


def test_genus2_infinity_mode():
    for n in (1, -1):
        a = zoo.genus2_smooth(n)
        assert cover.deck_translation(a.lift, relator_word(2), a) == n
