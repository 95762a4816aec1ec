"""Euler numbers of surface-group actions on the plane.

Four routes to the same integer:

* ``euler_via_lift``: deck translation of the lifted surface relator;
* ``euler_via_graphical``: turning number of the smoothed developed boundary
  of a fundamental polygon, ``e = turning + 1 - 2g``;
* ``euler_via_signed_sum``: for genus one with ``a1`` fixing ``p`` and a proper
  ``b1``-orbit, ``e = sum_{i>0} a_i - sum_{i<0} a_i`` with
  ``a_i = a1(tau).b1^i(tau) - tau.b1^i(tau)``;
* ``euler_via_writhe_difference``: ``e = [a1(tau)] - [tau]`` in the affine
  space of arcs from p to b1(p).

Plus the covering-trick identity and the free-arc tools.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import cover
from .curve import (
    ArcSpace,
    SampledCurve,
    _hermite_source,
    concat,
    hermite_chain,
    is_embedded,
    push_forward,
    sample,
    signed_intersections,
    smooth_corners,
    splice_near_endpoints,
    turning_number,
    writhe_difference,
)
from .errors import (
    DegenerateEdge,
    FixedPointSuspected,
    IdentityViolated,
    InputError,
    NonTransverseContact,
    NotApplicable,
    NumericalError,
    OddParity,
    OrbitMaybeNonProper,
    TailNotVanished,
    WritheChanged,
)
from .planemap import (
    Compose,
    Identity,
    MapExpr,
    Power,
    as_point,
    commutator,
    differential,
    relator_check,
)

MAX_RETRIES = 5


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True, eq=False)
class PlanarAction:
    """A surface group acting on the plane through named generators.

    ``assignment`` maps ``a1, b1, ..., ag, bg`` to plane maps.  The optional
    fields carry the data the individual methods need: a lift context, a
    fixed point ``p`` of ``a1`` with an arc ``tau`` from p to ``b1(p)``, and a
    basepoint for the graphical method.
    """

    genus: int
    assignment: dict
    name: str = "action"
    nonsmooth: tuple = ()
    fixed_point: tuple | None = None
    tau: SampledCurve | None = field(default=None, repr=False)
    lift: cover.LiftContext | None = None
    graphical_z0: tuple | None = None
    params: dict = field(default_factory=dict)
    smooth: bool = True

    def __post_init__(self):
        if self.genus < 1:
            raise InputError("genus must be at least 1")
        missing = [n for n in generator_names(self.genus) if n not in self.assignment]
        if missing:
            raise InputError(f"generators without a map: {missing}")

    @property
    def names(self):
        return generator_names(self.genus)

    def relator(self) -> MapExpr:
        return word_expr(relator_word(self.genus), self.assignment)

    def __getitem__(self, name):
        return self.assignment[name]


def generator_names(g: int):
    return [f"{x}{i}" for i in range(1, g + 1) for x in ("a", "b")]


def relator_word(g: int):
    """Tokens of prod_i [a_i, b_i] with [a, b] = a b a^-1 b^-1."""
    out = []
    for i in range(1, g + 1):
        a, b = f"a{i}", f"b{i}"
        out += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return out


def word_expr(word, assignment) -> MapExpr:
    parts = []
    for name, e in word:
        parts.append(assignment[name] if e == 1 else Power(assignment[name], int(e)))
    if not parts:
        return Identity()
    return parts[0] if len(parts) == 1 else Compose(tuple(parts))


@dataclass(frozen=True)
class CoefficientTable:
    """Integer coefficients indexed by -N..N."""

    kind: str
    N: int
    values: tuple
    spliced: tuple = ()
    tail_bound: int | None = None

    def __getitem__(self, i):
        if abs(i) > self.N:
            raise IndexError(i)
        return self.values[i + self.N]

    def as_dict(self):
        return {i: self[i] for i in range(-self.N, self.N + 1)}

    def largest_nonzero(self) -> int:
        nz = [abs(i) for i in range(-self.N, self.N + 1) if self[i] != 0]
        return max(nz) if nz else 0

    def signed_sum(self) -> int:
        return sum(self[i] for i in range(1, self.N + 1)) - sum(
            self[-i] for i in range(1, self.N + 1))

    def to_json(self):
        return {"kind": self.kind, "N": self.N, "values": list(self.values),
                "spliced": list(self.spliced), "tail_bound": self.tail_bound}


@dataclass(frozen=True)
class EulerReport:
    method: str
    value: int
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {"method": self.method, "value": int(self.value), "diagnostics": _jsonable(self.diagnostics)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, CoefficientTable):
        return x.to_json()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(round(float(x), 12))
    return x


# ---------------------------------------------------------------------------
# lift

def euler_via_lift(action: PlanarAction, ctx: cover.LiftContext | None = None) -> EulerReport:
    ctx = action.lift if ctx is None else ctx
    if ctx is None:
        raise NotApplicable(f"{action.name}: no lift context")
    word = relator_word(action.genus)
    turns = cover.deck_turns(ctx, word, action)
    m = cover.deck_translation(ctx, word, action)
    return EulerReport("lift", m, {
        "deck_turns": turns, "residue": abs(turns - m), "mode": ctx.mode,
        "center": list(ctx.center), "R": ctx.R, "z0": list(ctx.z0)})


# ---------------------------------------------------------------------------
# graphical

def _corner_directions(genus: int):
    """Angles for the directions u_a (start of the base arc of a) and w_a
    (start of the reversed translate of that arc by a^-1), all at z0.

    The corner before letter k, pulled back to z0, is a sector running
    counterclockwise from the outgoing edge of letter k to the reversed
    incoming edge of letter k - 1.  The sectors tile a full turn, which fixes
    the cyclic order.
    """
    word = relator_word(genus)
    m = len(word)

    def out_label(name, e):
        return (name, "u") if e > 0 else (name, "w")

    def in_label(name, e):
        return (name, "w") if e > 0 else (name, "u")
    by_out = {out_label(*word[k]): k for k in range(m)}
    order = [0]
    while len(order) < m:
        nxt = by_out[in_label(*word[order[-1] - 1])]
        if nxt == order[0]:
            raise NumericalError("polygon corners do not form a single cycle")
        order.append(nxt)
    step = 2 * math.pi / m
    return {out_label(*word[k]): j * step for j, k in enumerate(order)}


def _immersed_arc(z0, z1, u, v, L):
    """C1 arc z0 -> z1 leaving along u and arriving along v, through a waypoint.

    Waypoints are tried on a fixed schedule until the cubic pieces have no
    near-stationary point.
    """
    mid = 0.5 * (z0 + z1)
    for k in range(24):
        ang = 0.5 * math.pi + k * 2.4
        off = np.array([math.cos(ang), math.sin(ang)])
        sgn = 1.0 if k % 2 == 0 else -1.0
        tq = (z1 - z0) + sgn * L * np.array([-off[1], off[0]])
        q = mid + 0.6 * L * off
        tq = L * tq / float(np.linalg.norm(tq))
        srcs = [_hermite_source(z0, q, L * u, tq), _hermite_source(q, z1, tq, L * v)]
        tt = np.linspace(0.0, 1.0, 401)
        if min(float(np.linalg.norm(src(tt)[1], axis=1).min()) for src in srcs) > 0.05 * L:
            return hermite_chain([z0, q, z1], [L * u, tq, L * v])
    raise DegenerateEdge("could not route an immersed base arc")


def default_base_arcs(action: PlanarAction, z0, scale: float = 0.5):
    """Arcs z0 -> g(z0) whose end directions fit the corner order."""
    z0 = as_point(z0)
    angles = _corner_directions(action.genus)
    arcs = {}
    for name in action.names:
        g = action[name]
        gz = g.apply(z0[None])[0]
        u = np.array([math.cos(angles[(name, "u")]), math.sin(angles[(name, "u")])])
        w = np.array([math.cos(angles[(name, "w")]), math.sin(angles[(name, "w")])])
        J = differential(g, z0)
        end = -(J @ w)
        end = end / np.linalg.norm(end)
        L = max(float(np.linalg.norm(gz - z0)), scale)
        arcs[name] = _immersed_arc(z0, gz, u, end, L)
    return arcs


def developed_boundary(action: PlanarAction, base_arcs) -> list:
    """Edges of the developed polygon boundary, following the relator."""
    edges = []
    prefix = []
    for name, e in relator_word(action.genus):
        if e > 0:
            h = word_expr(prefix, action.assignment)
            edges.append(push_forward(h, base_arcs[name]))
        else:
            h = word_expr(prefix + [(name, -1)], action.assignment)
            edges.append(push_forward(h, base_arcs[name]).reversed())
        prefix = prefix + [(name, e)]
    return edges


def euler_via_graphical(action: PlanarAction, base_arcs=None, z0=None,
                        corner_radius: float | None = None) -> EulerReport:
    z0 = action.graphical_z0 if z0 is None else z0
    if z0 is None:
        raise NotApplicable(f"{action.name}: no basepoint for the graphical method")
    arcs = default_base_arcs(action, z0) if base_arcs is None else base_arcs
    edges = developed_boundary(action, arcs)
    if corner_radius is None:
        corner_radius = 0.05 * min(e.length() for e in edges)
    loop = smooth_corners(edges, corner_radius)
    wind = turning_number(loop)
    value = wind + 1 - 2 * action.genus
    return EulerReport("graphical", value, {
        "wind": wind, "genus": action.genus, "z0": list(as_point(z0)),
        "corner_radius": corner_radius, "samples": len(loop)})


# ---------------------------------------------------------------------------
# signed sums

def _seed_of(*items) -> int:
    h = hashlib.sha256(repr(items).encode()).digest()
    return int.from_bytes(h[:8], "little")


def perturb_arc(tau: SampledCurve, rng, amplitude: float = 1e-4, modes: int = 3) -> SampledCurve:
    """tau plus a C1 bump vanishing to second order at both ends."""
    src = tau.source
    c = rng.normal(size=(modes, 2)) * amplitude / math.sqrt(modes)
    k = np.arange(1, modes + 1)

    def new(t):
        t = np.asarray(t, dtype=float)
        p, d = src(t)
        s2 = np.sin(math.pi * t) ** 2
        ds2 = math.pi * np.sin(2 * math.pi * t)
        S = np.sin(np.outer(t, k) * math.pi)
        dS = np.cos(np.outer(t, k) * math.pi) * k * math.pi
        f = S @ c
        df = dS @ c
        return p + s2[:, None] * f, d + ds2[:, None] * f + s2[:, None] * df
    return sample(new, t0=tau.t)


def _genus_one(action, need_fixed=True):
    if action.genus != 1:
        raise NotApplicable("signed sums are defined for genus one")
    if need_fixed and action.fixed_point is None:
        raise NotApplicable(f"{action.name}: a1 has no declared fixed point")
    return action["a1"], action["b1"]


def arc_space(action: PlanarAction) -> ArcSpace:
    alpha, beta = _genus_one(action)
    p = as_point(action.fixed_point)
    if np.linalg.norm(alpha.apply(p[None])[0] - p) > 1e-9:
        raise InputError("declared point is not fixed by a1")
    bp = beta.apply(p[None])[0]
    return ArcSpace(tuple(p), tuple(bp), differential(beta, p))


def _bbox(c: SampledCurve):
    return c.points.min(axis=0), c.points.max(axis=0)


def _boxes_meet(b0, b1, pad=1e-9):
    return bool(np.all(b0[0] <= b1[1] + pad) and np.all(b1[0] <= b0[1] + pad))


def diameter_tail_bound(action: PlanarAction, tau: SampledCurve) -> int:
    """Index beyond which a_i must vanish: diameter of a1(tau) u tau over the orbit step, plus one."""
    alpha, beta = _genus_one(action)
    at = push_forward(alpha, tau)
    pts = np.concatenate([at.points, tau.points])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    diam = float(np.linalg.norm(hi - lo))
    p = as_point(action.fixed_point)
    step = float(np.linalg.norm(beta.apply(p[None])[0] - p))
    return int(math.floor(diam / step)) + 1


def _orbit_arcs(beta, tau, N):
    arcs = {0: tau}
    for i in range(1, N + 1):
        arcs[i] = push_forward(beta, arcs[i - 1])
        arcs[-i] = push_forward(beta.inverse(), arcs[-i + 1])
    return arcs


def _coefficients_once(action, tau, N, splice_radius, first_arc=None):
    alpha, beta = _genus_one(action)
    space = arc_space(action)
    space.check(tau)
    at = push_forward(alpha, tau) if first_arc is None else first_arc
    space.check(at)
    orbit = _orbit_arcs(beta, tau, N)
    L = float(np.linalg.norm(as_point(space.b) - as_point(space.a)))
    r = 0.1 * L if splice_radius is None else splice_radius
    delta = None
    for _ in range(6):
        try:
            delta = splice_near_endpoints(at, tau, r, space)
            break
        except WritheChanged:
            r *= 0.5
    if delta is None:
        raise WritheChanged("splice failed at every radius tried")
    K = (np.minimum(_bbox(at)[0], _bbox(tau)[0]), np.maximum(_bbox(at)[1], _bbox(tau)[1]))
    vals = [0] * (2 * N + 1)
    tail = 0
    for i in range(-N, N + 1):
        if i == 0:
            continue
        if _boxes_meet(K, _bbox(orbit[i])):
            tail = max(tail, abs(i) + 1)
        else:
            continue
        first = delta if abs(i) == 1 else at
        vals[i + N] = (signed_intersections(first, orbit[i])[0]
                       - signed_intersections(tau, orbit[i])[0])
    return CoefficientTable("a", N, tuple(vals), spliced=(-1, 1), tail_bound=tail), delta, orbit


def coefficients_a(action: PlanarAction, tau: SampledCurve | None = None, N: int = 20,
                   splice_radius: float | None = None, seed: int | None = None) -> CoefficientTable:
    """Table a_i for |i| <= N.  Near-tangential contacts trigger seeded perturbations of tau."""
    return _coefficients_with_retry(action, tau, N, splice_radius, seed)[0]


def coefficients_for_arc(action: PlanarAction, delta: SampledCurve, tau: SampledCurve | None = None,
                         N: int = 20, splice_radius: float | None = None) -> CoefficientTable:
    """a_i(delta) = delta.b1^i(tau) - tau.b1^i(tau) for any arc delta from p to b1(p).

    With delta = a1(tau) this is the usual table.  In general the signed sum
    equals [delta] - [tau].  No perturbation retries: delta is taken as given.
    """
    tau = action.tau if tau is None else tau
    return _coefficients_once(action, tau, N, splice_radius, first_arc=delta)[0]


def _coefficients_with_retry(action, tau, N, splice_radius, seed):
    tau = action.tau if tau is None else tau
    if tau is None:
        raise NotApplicable(f"{action.name}: no arc tau")
    if seed is None:
        seed = _seed_of(action.name, tuple(map(float, tau.points[len(tau) // 2])), N)
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(MAX_RETRIES + 1):
        try:
            table, delta, orbit = _coefficients_once(action, tau, N, splice_radius)
            return table, delta, orbit, tau, attempt
        except NonTransverseContact as exc:
            last = exc
            tau = perturb_arc(tau, rng)
    raise NonTransverseContact(f"degenerate contact persists after {MAX_RETRIES} perturbations: {last}")


PROBE_HORIZON = 50
PROBE_EXTENDED = 5000
ESCAPE_RADIUS = 1e12


def _orbit(beta, binv, p, horizon):
    fwd, back = [p], [p]
    for _ in range(horizon):
        if np.linalg.norm(fwd[-1]) > ESCAPE_RADIUS:
            break
        fwd.append(beta.apply(fwd[-1][None])[0])
    for _ in range(horizon):
        if np.linalg.norm(back[-1]) > ESCAPE_RADIUS:
            break
        back.append(binv.apply(back[-1][None])[0])
    return fwd, back


def _probe_once(fwd, back, p):
    idx = np.concatenate([-np.arange(len(back) - 1, 0, -1), np.arange(len(fwd))])
    P = np.array(back[:0:-1] + fwd)
    tree = cKDTree(P)
    close = any(abs(idx[a] - idx[b]) > 1 for a, b in tree.query_pairs(1e-3))
    dist, nb = tree.query(P, k=min(4, len(P)))
    gap = np.abs(idx[nb] - idx[:, None]) > 1
    dmin = float(dist[gap].min()) if gap.any() else math.inf
    r0 = max(float(np.linalg.norm(p)), float(np.linalg.norm(fwd[1] - p)), 1e-9)
    ends = [float(np.linalg.norm(fwd[-1])), float(np.linalg.norm(back[-1]))]
    if close:
        verdict = "returns"
    elif min(ends) > 10 * r0:
        verdict = "proper-like"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "min_distance": dmin, "start_radius": r0, "end_radii": ends,
            "steps": [len(back) - 1, len(fwd) - 1]}


def orbit_properness_probe(beta: MapExpr, p, horizon: int = PROBE_HORIZON,
                           extended_horizon: int = PROBE_EXTENDED) -> dict:
    """Heuristic verdict on the orbit of p: ``proper-like``, ``returns`` or ``inconclusive``.

    ``returns`` when two orbit points at index distance above one come within
    1e-3; ``proper-like`` when that never happens and both ends of the orbit
    leave ten times the starting radius.  An orbit still undecided after
    ``horizon`` steps each way is followed up to ``extended_horizon`` steps,
    looking only for returns.  Iteration stops once a point passes ``ESCAPE_RADIUS``.
    """
    p = as_point(p)
    binv = beta.inverse()
    fwd, back = _orbit(beta, binv, p, horizon)
    out = _probe_once(fwd, back, p)
    if out["verdict"] == "inconclusive" and extended_horizon > horizon:
        fwd, back = _orbit(beta, binv, p, extended_horizon)
        ext = _probe_once(fwd, back, p)
        if ext["verdict"] == "returns":
            out = ext
        out["extended_steps"] = ext["steps"]
    out["horizon"] = horizon
    return out


def euler_via_signed_sum(action: PlanarAction, tau: SampledCurve | None = None, N: int = 20,
                         seed: int | None = None) -> EulerReport:
    alpha, beta = _genus_one(action)
    probe = orbit_properness_probe(beta, action.fixed_point)
    if probe["verdict"] != "proper-like":
        raise OrbitMaybeNonProper(f"{action.name}: b1-orbit of p is {probe['verdict']}")
    table, _, _, used, attempts = _coefficients_with_retry(action, tau, N, None, seed)
    if table.tail_bound >= N:
        raise TailNotVanished(f"orbit arcs still reach a1(tau) at |i| = {N}; increase N")
    return EulerReport("signed_sum", table.signed_sum(), {
        "table": table, "N": N, "tail_bound": table.tail_bound,
        "largest_nonzero": table.largest_nonzero(), "perturbations": attempts,
        "probe": probe["verdict"]})


def euler_via_writhe_difference(action: PlanarAction, tau: SampledCurve | None = None) -> EulerReport:
    alpha, _ = _genus_one(action)
    tau = action.tau if tau is None else tau
    if tau is None:
        raise NotApplicable(f"{action.name}: no arc tau")
    space = arc_space(action)
    at = push_forward(alpha, tau)
    space.check(at)
    return EulerReport("writhe_difference", writhe_difference(at, tau, space), {})


# ---------------------------------------------------------------------------
# covering trick

def covering_weight(n: int, i: int) -> int:
    """X_n(i): i clamped to [-(2n+1), 2n+1]."""
    if n < 1:
        raise InputError("n must be positive")
    m = 2 * n + 1
    return max(-m, min(m, int(i)))


def convolution_A(table: CoefficientTable, n: int, j: int) -> int:
    m = 2 * n + 1
    return sum((m - abs(i)) * table[j * m + i] for i in range(-2 * n, 2 * n + 1))


@dataclass(frozen=True)
class CoveringTrickReport:
    n: int
    e: int
    weighted_sum: int
    A_direct: dict
    A_convolution: dict
    passed: bool


def covering_trick_check(action: PlanarAction, tau: SampledCurve | None = None, n: int = 1,
                         N: int | None = None, js=(-2, -1, 1, 2)) -> CoveringTrickReport:
    """Check sum_i X_n(i) a_i = (2n+1) e and the two computations of A_j.

    Direct A_j uses T = union of b1^i(tau) for |i| <= n and B = b1^(2n+1);
    for j = +-1 the image a1(T) is spliced to T near the endpoints, as for
    a_{+-1}.  A_0 has no direct counterpart (T would meet itself).
    """
    alpha, beta = _genus_one(action)
    m = 2 * n + 1
    tau = action.tau if tau is None else tau
    if N is None:
        N = m * (diameter_tail_bound(action, tau) + 1) + 2 * n + m * max(abs(j) for j in js)
    table, _, orbit, tau, _ = _coefficients_with_retry(action, tau, N, None, None)
    if table.tail_bound >= N:
        raise TailNotVanished(f"coefficients do not vanish within N={N}")
    e = table.signed_sum()
    weighted = sum(covering_weight(n, i) * table[i] for i in range(-N, N + 1))

    T = concat([orbit[i] for i in range(-n, n + 1)])
    B = Power(beta, m)
    p = as_point(action.fixed_point)
    Tspace = ArcSpace(tuple(T.start), tuple(T.end), differential(B, T.start))
    aT = push_forward(alpha, T)
    r = 0.1 * float(np.linalg.norm(orbit[0].end - orbit[0].start))
    dT = None
    for _ in range(6):
        try:
            dT = splice_near_endpoints(aT, T, r, Tspace)
            break
        except WritheChanged:
            r *= 0.5
    direct, conv = {}, {}
    for j in js:
        BT = push_forward(Power(beta, m * j), T)
        first = dT if abs(j) == 1 else aT
        direct[j] = signed_intersections(first, BT)[0] - signed_intersections(T, BT)[0]
        conv[j] = convolution_A(table, n, j)
    passed = weighted == m * e and direct == conv
    report = CoveringTrickReport(n, e, weighted, direct, conv, passed)
    if not passed:
        raise IdentityViolated(f"covering trick failed for n={n}: {report}",
                               lhs=(weighted, direct), rhs=(m * e, conv))
    return report


# ---------------------------------------------------------------------------
# free arcs

def _fixed_point_probe(alpha: MapExpr, tau: SampledCurve, n: int = 41, tol: float = 1e-6):
    lo, hi = _bbox(tau)
    pad = 0.25 * float(np.linalg.norm(hi - lo)) + 1e-3
    xs = np.linspace(lo[0] - pad, hi[0] + pad, n)
    ys = np.linspace(lo[1] - pad, hi[1] + pad, n)
    X, Y = np.meshgrid(xs, ys)
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    d = np.linalg.norm(alpha.apply(pts) - pts, axis=1)
    return float(d.min()), d.min() < tol


def is_free_arc(alpha: MapExpr, tau: SampledCurve, proximity: float = 1e-6) -> bool:
    """True iff tau and alpha(tau) meet only at the shared point alpha(tau(0))."""
    dmin, hit = _fixed_point_probe(alpha, tau)
    if hit:
        raise FixedPointSuspected(f"map moves a probe point by only {dmin:.3g}")
    at = push_forward(alpha, tau)
    if np.linalg.norm(at.start - tau.end) > 1e-9:
        raise InputError("tau must run from p to alpha(p)")
    try:
        _, events = signed_intersections(tau, at)
    except NonTransverseContact:
        return False
    if events:
        return False
    # proximity scan away from the shared point
    q = tau.end
    keep_a = np.linalg.norm(tau.points - q, axis=1) > 1e-3
    keep_b = np.linalg.norm(at.points - q, axis=1) > 1e-3
    A, B = tau.points[keep_a], at.points[keep_b]
    if len(A) and len(B):
        d = np.min(np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)) if len(A) * len(B) < 4e6 else 1.0
        if d < proximity:
            return False
    return True


def coefficients_b(alpha: MapExpr, delta: SampledCurve, N: int) -> CoefficientTable:
    """b_i = delta . alpha^i(delta) for |i| <= N (b_0 = 0)."""
    vals = [0] * (2 * N + 1)
    K = _bbox(delta)
    tail = 0
    fwd, back = delta, delta
    ainv = alpha.inverse()
    for i in range(1, N + 1):
        fwd = push_forward(alpha, fwd)
        back = push_forward(ainv, back)
        for idx, c in ((i, fwd), (-i, back)):
            if _boxes_meet(K, _bbox(c)):
                tail = max(tail, i + 1)
                vals[idx + N] = signed_intersections(delta, c)[0]
    return CoefficientTable("b", N, tuple(vals), tail_bound=tail)


def canonical_writhe(alpha: MapExpr, delta: SampledCurve, N: int = 10) -> int:
    """Half of w = sum_{i>0} b_i - sum_{i<0} b_i, an integer coordinate on arcs p -> alpha(p)."""
    dmin, hit = _fixed_point_probe(alpha, delta)
    if hit:
        raise FixedPointSuspected(f"map moves a probe point by only {dmin:.3g}")
    table = coefficients_b(alpha, delta, N)
    if table.tail_bound >= N:
        raise TailNotVanished(f"b_i do not vanish within N={N}")
    w = table.signed_sum()
    if w % 2:
        raise OddParity(f"w = {w} is odd", lhs=w, rhs="even")
    return w // 2


# ---------------------------------------------------------------------------
# dispatch

METHODS = ("lift", "graphical", "signed_sum", "writhe_difference")


def applicable_methods(action: PlanarAction):
    out = []
    if action.lift is not None:
        out.append("lift")
    if action.graphical_z0 is not None:
        out.append("graphical")
    if action.genus == 1 and action.fixed_point is not None and action.tau is not None:
        if action.smooth:
            probe = orbit_properness_probe(action["b1"], action.fixed_point)
            if probe["verdict"] == "proper-like":
                out.append("signed_sum")
        out.append("writhe_difference")
    return out


def compute(action: PlanarAction, method: str, **kw) -> EulerReport:
    method = method.replace("-", "_")
    if method == "signed_sum" and not action.smooth:
        raise NotApplicable(f"{action.name}: signed sums need a C1 action")
    fn = {"lift": euler_via_lift, "graphical": euler_via_graphical,
          "signed_sum": euler_via_signed_sum,
          "writhe_difference": euler_via_writhe_difference,
          "writhe_diff": euler_via_writhe_difference}.get(method)
    if fn is None:
        raise InputError(f"unknown method {method!r}")
    return fn(action, **kw)


def all_methods(action: PlanarAction):
    """Run every applicable method and check that they agree."""
    reports = [compute(action, m) for m in applicable_methods(action)]
    values = {r.value for r in reports}
    if len(values) > 1:
        raise IdentityViolated(f"{action.name}: methods disagree {[(r.method, r.value) for r in reports]}",
                               lhs=reports[0].value, rhs=sorted(values))
    return reports


__all__ = [
    "PlanarAction", "CoefficientTable", "EulerReport", "CoveringTrickReport",
    "generator_names", "relator_word", "word_expr", "relator_check", "commutator",
    "euler_via_lift", "euler_via_graphical", "default_base_arcs", "developed_boundary",
    "coefficients_a", "coefficients_for_arc", "coefficients_b", "euler_via_signed_sum", "euler_via_writhe_difference",
    "covering_weight", "convolution_A", "covering_trick_check", "is_free_arc",
    "canonical_writhe", "orbit_properness_probe", "perturb_arc", "diameter_tail_bound",
    "arc_space", "applicable_methods", "compute", "all_methods", "METHODS", "is_embedded",
]
