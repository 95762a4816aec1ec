import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eulerplane import planemap as pm, zoo
from eulerplane.checks import random_expr
from eulerplane.errors import BadRadii, NotDifferentiableHere, NotInjective, OverlappingSupports
from eulerplane.euler import PlanarAction


def test_translation_eval():
    assert np.allclose(pm.evaluate(pm.Translation((1.0, 0.0)), (0, 0)), (1, 0))


def test_twist_identity_outside_annulus():
    t = pm.make_annulus_twist((0, 0), 0.9, 1.1, 1)
    assert np.allclose(pm.evaluate(t, (2, 0)), (2, 0))
    assert np.allclose(pm.evaluate(t, (1.1 + 1e-9, 0)), (1.1 + 1e-9, 0))


def test_profile_is_symmetric():
    t = np.linspace(0, 1, 101)
    assert np.allclose(pm.smoothstep(t) + pm.smoothstep(1 - t), 1.0)
    assert pm.smoothstep(np.array([0.5]))[0] == pytest.approx(0.5)


def test_bestvina_alpha_rotates_mid_radius_by_half_turn():
    alpha = zoo.bestvina(1)["a1"]
    assert np.allclose(pm.evaluate(alpha, (1.0, 0.0)), (-1.0, 0.0), atol=1e-12)


def test_twist_k0_is_identity():
    t = pm.make_annulus_twist((0, 0), 0.9, 1.1, 0)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(50, 2))
    assert np.allclose(t.apply(pts), pts)


def test_twist_k2_mid_radius_is_fixed_but_not_linear_identity():
    t = pm.make_annulus_twist((0, 0), 0.9, 1.1, 2)
    assert np.allclose(pm.evaluate(t, (1.0, 0.0)), (1.0, 0.0), atol=1e-12)
    J = pm.differential(t, (1.0, 0.0))
    assert not np.allclose(J, np.eye(2))


def test_bad_radii():
    with pytest.raises(BadRadii):
        pm.make_annulus_twist((0, 0), 1.1, 0.9, 1)


def test_dilation_differential():
    J = pm.differential(pm.Dilation(2.0), (0.3, -1.7))
    assert np.allclose(J, 2 * np.eye(2))


def test_chain_rule():
    A = pm.make_annulus_twist((0, 0), 0.9, 1.1, 1)
    B = pm.Dilation(1.3, (0.2, 0.1))
    p = np.array([0.7, 0.2])
    J = pm.differential(pm.Compose((A, B)), p)
    expect = pm.differential(A, pm.evaluate(B, p)) @ pm.differential(B, p)
    assert np.allclose(J, expect)


def test_twist_differential_matches_finite_differences():
    t = pm.make_annulus_twist((0, 0), 0.9, 1.1, 1)
    J = pm.differential(t, (1.0, 0.0))
    F = pm.finite_difference_jacobian(t, (1.0, 0.0))
    assert np.linalg.norm(J - F) / np.linalg.norm(J) < 1e-6


def test_differential_refuses_accumulation_point():
    with pytest.raises(NotDifferentiableHere):
        pm.differential(zoo.bestvina(1)["a1"], (0.0, 0.0))


def test_step_translation_values():
    g = pm.make_step_translation((3.0, 0.0), -3.0, -2.0)
    assert np.allclose(pm.evaluate(g, (-5.0, 1.0)), (-5.0, 1.0))
    assert np.allclose(pm.evaluate(g, (0.0, 2.0)), (3.0, 2.0))
    assert np.allclose(pm.evaluate(g, (-2.5, 0.0)), (-1.0, 0.0))


def test_step_translation_rejects_noninjective_shift():
    with pytest.raises(NotInjective):
        pm.make_step_translation((-3.0, 0.0), -3.0, -2.0)


def test_conj_product_locator():
    core = pm.make_annulus_twist((0, 0), 0.9, 1.1, 1)
    prod = pm.lazy_twist_product(core, pm.Dilation(2.0), pm.ALL)
    assert prod.active_index(np.array([[1.95, 0.0]]))[0] == 1
    nonneg = pm.lazy_twist_product(core, pm.Dilation(2.0), pm.NONNEGATIVE)
    assert np.allclose(nonneg.apply(np.array([[0.5, 0.0]])), [[0.5, 0.0]])


def test_conj_product_overlap():
    core = pm.make_annulus_twist((0, 0), 0.5, 1.5, 1)
    with pytest.raises(OverlappingSupports):
        pm.lazy_twist_product(core, pm.Dilation(2.0), pm.ALL)


def test_relator_check_bestvina_and_genus2():
    assert pm.relator_check(zoo.bestvina(1)).max_displacement < 1e-9
    assert pm.relator_check(zoo.genus2_smooth(1)).passed


def test_broken_genus2_assignment_fails_by_about_one_twist():
    good = zoo.genus2_smooth(1)
    a = dict(good.assignment)
    a["a2"], a["b2"] = good["b2"], good["a2"]
    broken = PlanarAction(2, a, name="broken", lift=good.lift)
    rep = pm.relator_check(broken)
    assert not rep.passed
    # a twist by a full turn moves mid-radius points by up to a diameter
    assert rep.max_displacement > 0.5


def _random_points(seed, n=50):
    return np.random.default_rng(seed).uniform(-2.5, 2.5, size=(n, 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_inverse_round_trip(seed):
    rng = np.random.default_rng(seed)
    expr = pm.Compose((random_expr(rng), random_expr(rng)))
    pts = _random_points(seed)
    back = expr.inverse().apply(expr.apply(pts))
    assert np.max(np.abs(back - pts)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_differential_orientation_and_fd(seed):
    rng = np.random.default_rng(seed)
    expr = random_expr(rng)
    for p in _random_points(seed, 10):
        J = pm.differential(expr, p)
        assert np.linalg.det(J) > 0
        F = pm.finite_difference_jacobian(expr, p)
        assert np.linalg.norm(J - F) / np.linalg.norm(J) < 1e-5


def test_rotation_is_rigid_on_circles():
    R = pm.Rotation(0.7)
    th = np.linspace(0, 2 * math.pi, 30)
    pts = np.stack([np.cos(th), np.sin(th)], axis=1) * 1.3
    img = R.apply(pts)
    assert np.allclose(np.linalg.norm(img, axis=1), 1.3)
