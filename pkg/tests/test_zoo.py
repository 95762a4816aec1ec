import numpy as np
import pytest

from eulerplane import euler, planemap as pm, zoo
from eulerplane.errors import InputError


@pytest.mark.parametrize("name", sorted(zoo.REGISTRY))
def test_every_recipe_passes_relator_check(name):
    rep = pm.relator_check(zoo.build(name))
    assert rep.passed and rep.n_samples > 150


@pytest.mark.parametrize("seed", range(5))
def test_twist_chain_relator_and_tau(seed):
    action = zoo.torus_twist_chain(seed)
    assert pm.relator_check(action).passed
    assert np.allclose(action.tau.start, action.fixed_point)
    assert np.allclose(action.tau.end, pm.evaluate(action["b1"], action.fixed_point))
    assert np.allclose(pm.evaluate(action["a1"], action.fixed_point), action.fixed_point)


def test_twist_chain_is_seeded():
    a, b = zoo.torus_twist_chain(3), zoo.torus_twist_chain(3)
    assert a.params == b.params
    assert a.params != zoo.torus_twist_chain(4).params


@pytest.mark.parametrize("n", [1, 0, -2])
def test_bestvina_values(n):
    assert euler.euler_via_lift(zoo.bestvina(n)).value == n


@pytest.mark.parametrize("n", [1, 0, 3])
def test_genus2_values(n):
    assert euler.euler_via_lift(zoo.genus2_smooth(n)).value == n


def test_torus_shear_properties():
    action = zoo.torus_shear()
    assert euler.orbit_properness_probe(action["b1"], action.fixed_point)["verdict"] == "proper-like"
    assert {r.value for r in euler.all_methods(action)} == {0}
    assert set(euler.applicable_methods(action)) == set(euler.METHODS)


def test_commuting_rotation_twist_properties():
    action = zoo.commuting_rotation_twist()
    assert euler.euler_via_lift(action).value == 0
    assert euler.orbit_properness_probe(action["b1"], (1.5, 0.0))["verdict"] == "returns"
    assert "signed_sum" not in euler.applicable_methods(action)
    with pytest.raises(InputError):
        zoo.commuting_rotation_twist(theta=0.0)


def test_free_translations_properties():
    action = zoo.free_translations()
    seg = zoo.free_segment(action)
    assert euler.is_free_arc(action["a1"], seg)
    assert euler.canonical_writhe(action["a1"], seg) == 0
    assert euler.euler_via_lift(action).value == euler.euler_via_graphical(action).value == 0
    with pytest.raises(InputError):
        zoo.free_translations((1, 0), (2, 0))


def test_pullbacks():
    assert euler.euler_via_lift(zoo.pullback_degree_one(zoo.bestvina(1), 2)).value == 1
    assert euler.euler_via_lift(zoo.pullback_degree_one(zoo.trivial(), 2)).value == 0
    pb = zoo.pullback_degree_one(zoo.bestvina(-3), 3)
    assert pm.relator_check(pb).passed
    assert euler.euler_via_lift(pb).value == -3
    with pytest.raises(InputError):
        zoo.pullback_degree_one(zoo.bestvina(1), 1)


def test_registry_and_expected_values():
    assert zoo.expected_euler("bestvina", {"n": 4}) == 4
    assert zoo.expected_euler("torus_shear", {}) == 0
    with pytest.raises(InputError):
        zoo.build("nope")
