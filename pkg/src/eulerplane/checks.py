"""Built-in property suite, run by ``euler-plane check`` and by the acceptance tests.

Each check returns a :class:`CheckResult`; none of them raises on a failed
identity, so a full run always reports every line.
"""
from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import euler, planemap as pm, zoo
from .curve import (
    ArcSpace,
    add_twist,
    bump_arc,
    is_embedded,
    residue_monitor,
    writhe_difference,
)
from .errors import EulerPlaneError

RESIDUE_BOUND = 0.05


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number}. {self.name} ({self.seconds:.1f} s): {self.detail}"


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def _guard(number, name):
    """Turn unexpected exceptions into a failed CheckResult."""
    def deco(fn):
        def wrapper(*args, **kw):
            t0 = time.perf_counter()
            try:
                res = fn(*args, **kw)
            except EulerPlaneError as exc:
                res = CheckResult(number, name, False, f"{type(exc).__name__}: {exc}")
            except Exception as exc:  # noqa: BLE001 - reported, not swallowed silently
                res = CheckResult(number, name, False,
                                  f"{type(exc).__name__}: {exc}\n{traceback.format_exc()}")
            res.seconds = time.perf_counter() - t0
            return res
        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        return wrapper
    return deco


# ---------------------------------------------------------------------------

@_guard(1, "Bestvina action: lift gives n")
def check_bestvina(ns=range(-3, 4), time_limit=5.0) -> CheckResult:
    got, slow = {}, {}
    for n in ns:
        rep, dt = _timed(euler.euler_via_lift, zoo.bestvina(n))
        got[n] = rep.value
        if dt >= time_limit:
            slow[n] = round(dt, 2)
    ok = all(got[n] == n for n in ns) and not slow
    return CheckResult(1, "Bestvina action: lift gives n", ok,
                       f"values {got}" + (f", slow runs {slow}" if slow else ""), data={"values": got})


@_guard(2, "genus-two action: lift and graphical give n")
def check_genus2(ns=range(-2, 3), time_limit=30.0) -> CheckResult:
    got, slow = {}, {}
    for n in ns:
        action = zoo.genus2_smooth(n)
        lift, t_lift = _timed(euler.euler_via_lift, action)
        graph, t_graph = _timed(euler.euler_via_graphical, action)
        got[n] = (lift.value, graph.value)
        for m, dt in (("lift", t_lift), ("graphical", t_graph)):
            if dt >= time_limit:
                slow[(n, m)] = round(dt, 2)
    ok = all(got[n] == (n, n) for n in ns) and not slow
    return CheckResult(2, "genus-two action: lift and graphical give n", ok,
                       f"(lift, graphical) {got}" + (f", slow runs {slow}" if slow else ""),
                       data={"values": got})


@_guard(3, "torus actions: every applicable method gives 0")
def check_torus_zero() -> CheckResult:
    out = {}
    for name in ("torus_shear", "commuting_rotation_twist", "free_translations"):
        action = zoo.build(name)
        out[name] = {r.method: r.value for r in euler.all_methods(action)}
    ok = all(v and all(x == 0 for x in v.values()) for v in out.values())
    return CheckResult(3, "torus actions: every applicable method gives 0", ok, str(out), data=out)


@_guard(4, "coefficient tail vanishes beyond the diameter bound")
def check_tail(N=50) -> CheckResult:
    action = zoo.torus_shear()
    bound = euler.diameter_tail_bound(action, action.tau)
    table = euler.coefficients_a(action, N=N)
    bad = {i: table[i] for i in range(-N, N + 1) if abs(i) > bound and table[i] != 0}
    ok = not bad and table.largest_nonzero() <= bound
    return CheckResult(4, "coefficient tail vanishes beyond the diameter bound", ok,
                       f"bound {bound}, largest nonzero |i| {table.largest_nonzero()}, N {N}"
                       + (f", nonzero beyond bound {bad}" if bad else ""))


@_guard(5, "covering trick identities")
def check_covering(ns=(1, 2, 3), seeds=range(5)) -> CheckResult:
    actions = [zoo.torus_shear()] + [zoo.torus_twist_chain(s) for s in seeds]
    failures, nontrivial = [], 0
    for action in actions:
        for n in ns:
            try:
                rep = euler.covering_trick_check(action, n=n)
            except EulerPlaneError as exc:
                failures.append(f"{action.name}{action.params.get('seed', '')} n={n}: {exc}")
                continue
            nontrivial += any(v != 0 for v in rep.A_direct.values())
    ok = not failures
    return CheckResult(5, "covering trick identities", ok,
                       f"{len(actions) * len(ns)} cases, {nontrivial} with nonzero A_j"
                       + (f"; failures: {failures}" if failures else ""))


# ---------------------------------------------------------------------------

def random_arc(rng, a, b):
    """Bump arc from a to b (tangent parallel to b - a at both ends) with random shape."""
    height = float(rng.uniform(-0.6, 0.6))
    harm = [(j, float(rng.normal(scale=0.12))) for j in (1, 2, 3)]
    return bump_arc(a, b, height, harm)


def _random_endpoints(rng):
    a = rng.uniform(-2, 2, size=2)
    ang = rng.uniform(0, 2 * math.pi)
    b = a + rng.uniform(0.5, 2.0) * np.array([math.cos(ang), math.sin(ang)])
    return a, b


@_guard(6, "writhe calculus: twists and additivity")
def check_writhe(n_arcs=100, n_triples=30, seed=6) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = []
    for i in range(n_arcs):
        a, b = _random_endpoints(rng)
        space = ArcSpace(tuple(a), tuple(b))
        x = random_arc(rng, a, b)
        for k in range(-3, 4):
            got = writhe_difference(add_twist(x, k), x, space)
            if got != k:
                bad.append(("twist", i, k, got))
    for i in range(n_triples):
        a, b = _random_endpoints(rng)
        space = ArcSpace(tuple(a), tuple(b))
        ks = rng.integers(-3, 4, size=3)
        x, y, z = (add_twist(random_arc(rng, a, b), int(k)) for k in ks)
        xy, yz, xz = (writhe_difference(p, q, space) for p, q in ((x, y), (y, z), (x, z)))
        if xz != xy + yz or xz != ks[0] - ks[2]:
            bad.append(("triple", i, tuple(int(k) for k in ks), (xy, yz, xz)))
    return CheckResult(6, "writhe calculus: twists and additivity", not bad,
                       f"{n_arcs} arcs x 7 twists, {n_triples} triples"
                       + (f"; mismatches {bad[:5]}" if bad else ""))


@_guard(7, "canonical writhe on free translations")
def check_canonical(ks=range(-3, 4)) -> CheckResult:
    action = zoo.free_translations()
    seg = zoo.free_segment(action)
    alpha = action["a1"]
    free = euler.is_free_arc(alpha, seg)
    got = {k: euler.canonical_writhe(alpha, add_twist(seg, k) if k else seg) for k in ks}
    ok = free and all(got[k] == k for k in ks)
    return CheckResult(7, "canonical writhe on free translations", ok,
                       f"segment free: {free}; values {got}; parity enforced by canonical_writhe")


def orbit_clearance(action, tau, span=20):
    """Distance from tau to the orbit points b1^i(p), i not in {0, 1}."""
    beta = action["b1"]
    p = pm.as_point(action.fixed_point)
    pts, q, r = [], p, p
    for _ in range(span):
        q = beta.apply(q[None])[0]
        r = beta.apply_inverse(r[None])[0]
        pts += [q, r]
    pts = np.array(pts[2:] + [pts[1]])
    return float(np.min(np.linalg.norm(tau.points[:, None, :] - pts[None], axis=2)))


@_guard(8, "homotopy invariance of the signed sum")
def check_homotopy(n=50, seed=8, amplitude=0.15) -> CheckResult:
    action = zoo.torus_shear()
    base = euler.euler_via_signed_sum(action).value
    rng = np.random.default_rng(seed)
    values, tried = [], 0
    while len(values) < n and tried < 10 * n:
        tried += 1
        tau = euler.perturb_arc(action.tau, rng, amplitude=amplitude)
        if not is_embedded(tau) or orbit_clearance(action, tau) < 0.05:
            continue
        values.append(euler.euler_via_signed_sum(action, tau=tau).value)
    ok = len(values) == n and all(v == base for v in values)
    return CheckResult(8, "homotopy invariance of the signed sum", ok,
                       f"unperturbed {base}; {len(values)} perturbations, distinct values {sorted(set(values))}")


# ---------------------------------------------------------------------------

def _primitive_pool(rng):
    c = lambda: tuple(rng.uniform(-1.5, 1.5, size=2))  # noqa: E731
    r_in = float(rng.uniform(0.3, 0.8))
    r_out = r_in * float(rng.uniform(1.3, 2.0))
    return [
        pm.AnnulusTwist(c(), r_in, r_out, int(rng.choice([-2, -1, 1, 2]))),
        pm.DiskRotation(c(), 0.5 * r_in, r_out, float(rng.uniform(-3, 3))),
        pm.Translation(tuple(rng.uniform(-1, 1, size=2))),
        pm.Dilation(float(rng.uniform(0.5, 2.0)), c()),
        pm.Rotation(float(rng.uniform(-3, 3))),
        pm.make_step_translation((float(rng.uniform(0.5, 2.0)), 0.0), -0.5, 0.5),
        pm.StripShear(-0.3, 0.4, float(rng.uniform(-2, 2))),
    ]


def random_expr(rng, max_len=4):
    pool = _primitive_pool(rng)
    parts = []
    for _ in range(int(rng.integers(1, max_len + 1))):
        e = pool[int(rng.integers(len(pool)))]
        r = rng.random()
        if r < 0.2:
            e = e.inverse()
        elif r < 0.3:
            e = pm.Power(e, int(rng.choice([-2, 2])))
        parts.append(e)
    return parts[0] if len(parts) == 1 else pm.Compose(tuple(parts))


@_guard(9, "numerical kernels")
def check_kernels(n_pairs=1000, seed=9, tol=1e-5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        expr = random_expr(rng)
        p = rng.uniform(-2.5, 2.5, size=2)
        J = pm.differential(expr, p)
        F = pm.finite_difference_jacobian(expr, p)
        worst = max(worst, float(np.linalg.norm(J - F) / np.linalg.norm(J)))
    residue_ok = residue_monitor.max < RESIDUE_BOUND
    ok = worst < tol and residue_ok
    return CheckResult(9, "numerical kernels", ok,
                       f"worst Jacobian relative error {worst:.2e} over {n_pairs} pairs; "
                       f"largest turning residue so far {residue_monitor.max:.2e} "
                       f"over {residue_monitor.count} turning numbers")


ALL_CHECKS = (check_bestvina, check_genus2, check_torus_zero, check_tail, check_covering,
              check_writhe, check_canonical, check_homotopy, check_kernels)


def run_all(emit=print):
    """Run every check, emitting one line each; the kernel check runs last so it sees all residues."""
    results = []
    for fn in ALL_CHECKS:
        res = fn()
        results.append(res)
        if emit is not None:
            emit(res.line())
    return results
