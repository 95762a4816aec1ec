import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eulerplane import planemap as pm
from eulerplane.checks import random_arc, random_expr
from eulerplane.curve import (
    ArcSpace,
    add_twist,
    bump_arc,
    circle,
    figure_eight,
    is_embedded,
    push_forward,
    route_return_path,
    sample,
    segment,
    signed_intersections,
    smooth_corners,
    splice_near_endpoints,
    turning_number,
    writhe_difference,
)
from eulerplane.errors import CuspCorner, InputError, NonTransverseContact


def test_circle_and_figure_eight():
    assert turning_number(circle()) == 1
    assert turning_number(circle(ccw=False)) == -1
    assert turning_number(figure_eight()) == 0


def test_sampling_respects_max_turn():
    c = circle(radius=0.01)
    assert np.max(np.abs(c.tangent_steps())) < c.max_turn


def test_push_forward_identity_and_rigid_motion():
    c = circle()
    same = push_forward(pm.Identity(), c)
    assert np.allclose(same.points[[0, -1]], c.points[[0, -1]])
    rot = push_forward(pm.Rotation(0.6), c)
    assert np.allclose(np.linalg.norm(rot.points, axis=1), 1.0)
    th = np.arctan2(c.tangents[0, 1], c.tangents[0, 0]) + 0.6
    assert np.allclose(rot.tangents[0], [math.cos(th), math.sin(th)])


def test_push_forward_dilation_keeps_turning():
    big = push_forward(pm.Dilation(2.0), circle())
    assert np.allclose(np.linalg.norm(big.points, axis=1), 2.0)
    assert turning_number(big) == 1


def test_turning_invariant_under_rigid_motion_and_resampling():
    c = figure_eight(1.3)
    moved = push_forward(pm.Compose((pm.Translation((3.0, -1.0)), pm.Rotation(2.0))), c)
    assert turning_number(moved) == turning_number(c)
    t2 = np.sort(np.concatenate([c.t, 0.5 * (c.t[:-1] + c.t[1:])]))
    dense = sample(c.source, closed=True, t0=t2)
    assert len(dense) >= 2 * len(c) - 1
    assert turning_number(dense) == turning_number(c)
    t3 = np.sort(np.concatenate([circle().t, 0.5 * (circle().t[:-1] + circle().t[1:])]))
    assert turning_number(sample(circle().source, closed=True, t0=t3)) == 1


def test_turning_needs_closed_curve():
    with pytest.raises(InputError):
        turning_number(segment((0, 0), (1, 0)))


def test_single_crossing_sign():
    A = segment((0, 0.5), (1, 0.5))     # left to right
    B = segment((0.5, 0), (0.5, 1))     # bottom to top
    n, ev = signed_intersections(A, B)
    assert n == 1 and len(ev) == 1 and ev[0].sign == 1
    assert np.allclose(ev[0].point, (0.5, 0.5))
    assert signed_intersections(B, A)[0] == -1


def test_disjoint_curves():
    n, ev = signed_intersections(segment((0, 0), (1, 0)), segment((0, 1), (1, 1)))
    assert n == 0 and ev == []


def test_shared_endpoint_is_excluded():
    n, ev = signed_intersections(segment((0, 0), (1, 0)), segment((1, 0), (1, 1)))
    assert n == 0 and ev == []


def test_tangential_contact_raises():
    A = segment((0, 0), (2, 0))
    B = segment((1, 0), (1, 1))      # starts on the interior of A
    with pytest.raises(NonTransverseContact):
        signed_intersections(A, B)


def _random_pair(rng):
    a = bump_arc(rng.uniform(-1, 0, 2), rng.uniform(0.5, 1.5, 2), rng.uniform(-1, 1),
                 [(j, rng.normal(scale=0.3)) for j in (1, 2, 3)])
    b = bump_arc(rng.uniform(-1, 0, 2) + [0, 1], rng.uniform(0.5, 1.5, 2) - [0, 1.5],
                 rng.uniform(-1, 1), [(j, rng.normal(scale=0.3)) for j in (1, 2, 3)])
    return a, b


def test_antisymmetry_over_random_pairs():
    rng = np.random.default_rng(11)
    done = 0
    while done < 100:
        A, B = _random_pair(rng)
        try:
            ab = signed_intersections(A, B)[0]
        except NonTransverseContact:
            continue
        assert signed_intersections(B, A)[0] == -ab
        done += 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_intersections_invariant_under_push_forward(seed):
    rng = np.random.default_rng(seed)
    A, B = _random_pair(rng)
    try:
        n = signed_intersections(A, B)[0]
    except NonTransverseContact:
        return
    g = random_expr(rng)
    assert signed_intersections(push_forward(g, A), push_forward(g, B))[0] == n


def _square(ccw=True):
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    if not ccw:
        pts = pts[::-1]
    return [segment(pts[i], pts[(i + 1) % 4]) for i in range(4)]


def test_smooth_square():
    assert turning_number(smooth_corners(_square(), 0.1)) == 1
    assert turning_number(smooth_corners(_square(ccw=False), 0.1)) == -1


def test_cusp_corner():
    arcs = [segment((0, 0), (1, 0)), segment((1, 0), (0, 0))]
    with pytest.raises(CuspCorner):
        smooth_corners(arcs, 0.1)


def test_smoothed_loop_keeps_arcs_away_from_corners():
    loop = smooth_corners(_square(), 0.1)
    mid = np.array([0.5, 0.0])
    assert np.min(np.linalg.norm(loop.points - mid, axis=1)) < 1e-9


SPACE = ArcSpace((0.0, 0.0), (1.0, 0.0))


def test_add_twist_basics():
    x = bump_arc((0, 0), (1, 0), 0.4)
    assert add_twist(x, 0) is x
    assert writhe_difference(x, x, SPACE) == 0
    assert writhe_difference(add_twist(x, 1), x, SPACE) == 1
    assert writhe_difference(add_twist(add_twist(x, 1), -1), x, SPACE) == 0
    for k in range(-3, 4):
        tw = add_twist(x, k)
        assert is_embedded(tw)
        assert writhe_difference(tw, x, SPACE) == k


def test_twist_is_local_to_terminal_point():
    x = bump_arc((0, 0), (1, 0), 0.4)
    tw = add_twist(x, 2)
    t = np.linspace(0, 1, 400)
    px, _ = x.source(t)
    pt, _ = tw.source(t)
    far = np.linalg.norm(px - x.end, axis=1) > 0.2
    assert far.sum() > 100
    assert np.allclose(px[far], pt[far])
    assert not np.allclose(px[~far], pt[~far])


def test_return_path_invariance():
    rng = np.random.default_rng(21)
    for i in range(50):
        x = add_twist(random_arc(rng, (0.0, 0.0), (1.0, 0.0)), int(rng.integers(-2, 3)))
        y = add_twist(random_arc(rng, (0.0, 0.0), (1.0, 0.0)), int(rng.integers(-2, 3)))
        d0 = writhe_difference(x, y, SPACE)
        d1 = writhe_difference(x, y, SPACE, return_path=route_return_path(x, variant=i + 1))
        assert d0 == d1


def test_writhe_additivity_and_antisymmetry():
    rng = np.random.default_rng(5)
    for _ in range(10):
        ks = rng.integers(-3, 4, size=3)
        x, y, z = (add_twist(random_arc(rng, (0.0, 0.0), (1.0, 0.0)), int(k)) for k in ks)
        xy = writhe_difference(x, y, SPACE)
        assert writhe_difference(y, x, SPACE) == -xy
        assert writhe_difference(x, z, SPACE) == xy + writhe_difference(y, z, SPACE)


def test_splice_identity_and_generic():
    tmpl = bump_arc((0, 0), (1, 0), 0.3)
    same = splice_near_endpoints(tmpl, tmpl, 0.1, SPACE)
    assert np.allclose(same.start, tmpl.start) and np.allclose(same.end, tmpl.end)
    assert writhe_difference(same, tmpl, SPACE) == 0
    other = bump_arc((0, 0), (1, 0), -0.5, [(2, 0.2)])
    d = splice_near_endpoints(other, tmpl, 0.1, SPACE)
    assert writhe_difference(other, d, SPACE) == 0
    # away from the endpoints the splice follows the other arc
    mid = other.points[len(other) // 2]
    assert np.min(np.linalg.norm(d.points - mid, axis=1)) < 1e-9


def test_splice_of_twisted_template_keeps_writhe():
    tmpl = bump_arc((0, 0), (1, 0), 0.3)
    A = add_twist(tmpl, 1)
    d = splice_near_endpoints(A, tmpl, 0.15, SPACE)
    assert writhe_difference(A, d, SPACE) == 0
    # near the endpoints the splice leaves along the template's direction
    assert np.allclose(d.tangents[0], tmpl.tangents[0], atol=1e-6)
    assert np.allclose(d.tangents[-1], tmpl.tangents[-1], atol=1e-6)
