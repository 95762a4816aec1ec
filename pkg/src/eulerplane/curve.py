"""Oriented C1 arcs and loops carried as adaptive samples.

A :class:`SampledCurve` keeps its parametric source (``t -> (points,
derivatives)``) next to the samples so that pushing it through a map can
re-establish the sampling contract: the unit tangent turns by less than
``max_turn`` radians between consecutive samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (
    AntipodalTangents,
    CuspCorner,
    DegenerateEdge,
    InputError,
    NoFreeDisk,
    NonTransverseContact,
    NotDifferentiableHere,
    NotInArcSpace,
    NumericalError,
    ResidueTooLarge,
    ReturnPathCrossesEndpointBall,
    WritheChanged,
)
from .planemap import AnnulusTwist, DiskRotation, MapExpr, as_point, smoothstep, smoothstep_slope

Source = Callable[[np.ndarray], tuple]

MAX_TURN = 0.1
TRANSPORT_TOL = 1e-6
TRANSVERSE_TOL = 1e-9
RESIDUE_BOUND = 0.05


def _unit(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def signed_angle(u, v):
    """Angle in (-pi, pi] rotating direction u onto direction v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.arctan2(_cross(u, v), np.sum(u * v, axis=-1))


# ---------------------------------------------------------------------------
# the curve type

@dataclass(frozen=True, eq=False)
class SampledCurve:
    t: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    closed: bool = False
    source: Source | None = field(default=None, repr=False)
    max_turn: float = MAX_TURN
    embedding_checked: bool = False

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def __len__(self):
        return len(self.t)

    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def reversed(self) -> "SampledCurve":
        src = None
        if self.source is not None:
            inner = self.source

            def src(t, inner=inner):
                p, d = inner(1.0 - np.asarray(t, dtype=float))
                return p, -d
        return SampledCurve(
            1.0 - self.t[::-1], self.points[::-1].copy(), -self.tangents[::-1],
            self.closed, src, self.max_turn, self.embedding_checked)

    def tangent_steps(self) -> np.ndarray:
        return signed_angle(self.tangents[:-1], self.tangents[1:])


def sample(source: Source, closed: bool = False, max_turn: float = MAX_TURN,
           t0=None, n0: int = 65, refine: Callable | None = None,
           max_rounds: int = 40) -> SampledCurve:
    """Sample ``source`` until consecutive tangents turn by less than ``max_turn``.

    ``refine(t0, t1, p0, p1)`` may flag further intervals given their
    parameters and end points.
    """
    t = np.linspace(0.0, 1.0, n0)
    if t0 is not None and len(t0) >= 2:
        t = np.unique(np.clip(t0, 0.0, 1.0))
    if t[0] > 0:
        t = np.concatenate([[0.0], t])
    if t[-1] < 1:
        t = np.concatenate([t, [1.0]])
    pts, der = source(t)
    for _ in range(max_rounds):
        speed = np.linalg.norm(der, axis=1)
        if np.any(speed < 1e-300) or not np.all(np.isfinite(pts)):
            raise DegenerateEdge("curve is not an immersion at the sampled parameters")
        tan = der / speed[:, None]
        tm = 0.5 * (t[:-1] + t[1:])
        pm, dm = source(tm)
        um = _unit(dm)
        bad = (np.abs(signed_angle(tan[:-1], um)) + np.abs(signed_angle(um, tan[1:]))) >= max_turn
        if refine is not None:
            bad |= refine(t[:-1], t[1:], pts[:-1], pts[1:])
        if not bad.any():
            break
        if np.min(np.diff(t)[bad]) < 1e-13:
            raise NumericalError("adaptive sampling stalled (parameter step below 1e-13)")
        t = np.concatenate([t, tm[bad]])
        pts = np.concatenate([pts, pm[bad]])
        der = np.concatenate([der, dm[bad]])
        order = np.argsort(t, kind="stable")
        t, pts, der = t[order], pts[order], der[order]
    else:
        raise NumericalError("adaptive sampling did not converge")
    return SampledCurve(t, pts, _unit(der), closed, source, max_turn)


# ---------------------------------------------------------------------------
# constructors

def from_function(f: Callable, df: Callable, closed=False, **kw) -> SampledCurve:
    def src(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(f(t), dtype=float), np.asarray(df(t), dtype=float)
    return sample(src, closed=closed, **kw)


def segment(a, b) -> SampledCurve:
    a, b = as_point(a), as_point(b)
    return from_function(lambda t: a + t[:, None] * (b - a),
                         lambda t: np.broadcast_to(b - a, (len(t), 2)).copy(), n0=3)


def circle(center=(0.0, 0.0), radius=1.0, ccw=True, start_angle=0.0) -> SampledCurve:
    c = as_point(center)
    sgn = 1.0 if ccw else -1.0

    def f(t):
        th = start_angle + sgn * 2 * math.pi * t
        return c + radius * np.stack([np.cos(th), np.sin(th)], axis=1)

    def df(t):
        th = start_angle + sgn * 2 * math.pi * t
        return sgn * 2 * math.pi * radius * np.stack([-np.sin(th), np.cos(th)], axis=1)
    return from_function(f, df, closed=True)


def figure_eight(scale=1.0) -> SampledCurve:
    """Smooth immersed figure eight (Whitney index 0)."""
    def f(t):
        th = 2 * math.pi * t
        return scale * np.stack([np.sin(th), np.sin(th) * np.cos(th)], axis=1)

    def df(t):
        th = 2 * math.pi * t
        return 2 * math.pi * scale * np.stack([np.cos(th), np.cos(2 * th)], axis=1)
    return from_function(f, df, closed=True)


def _hermite_source(p0, p1, m0, m1):
    p0, p1, m0, m1 = (np.asarray(v, dtype=float) for v in (p0, p1, m0, m1))

    def src(t):
        t = np.asarray(t, dtype=float)[:, None]
        t2, t3 = t * t, t * t * t
        pts = ((2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0
               + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1)
        der = ((6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0
               + (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1)
        return pts, der
    return src


def hermite(p0, p1, m0, m1) -> SampledCurve:
    """Cubic Hermite arc from p0 (velocity m0) to p1 (velocity m1)."""
    return sample(_hermite_source(p0, p1, m0, m1))


def hermite_chain(points, velocities) -> SampledCurve:
    """C1 arc through ``points`` with the given velocity at each point."""
    pieces = [hermite(points[i], points[i + 1], velocities[i], velocities[i + 1])
              for i in range(len(points) - 1)]
    return concat(pieces)


def bump_arc(a, b, height: float, harmonics=()) -> SampledCurve:
    """Arc a + t(b - a) + sin^2(pi t) (height + sum c_k sin(k pi t)) * left normal.

    Its tangent at both ends is parallel to b - a.
    """
    a, b = as_point(a), as_point(b)
    v = b - a
    n = np.array([-v[1], v[0]]) / np.linalg.norm(v)
    coeffs = [(k, float(c)) for k, c in harmonics]

    def prof(t):
        g = np.full_like(t, height)
        dg = np.zeros_like(t)
        for k, c in coeffs:
            g = g + c * np.sin(k * math.pi * t)
            dg = dg + c * k * math.pi * np.cos(k * math.pi * t)
        s2 = np.sin(math.pi * t) ** 2
        ds2 = math.pi * np.sin(2 * math.pi * t)
        return s2 * g, ds2 * g + s2 * dg

    def src(t):
        t = np.asarray(t, dtype=float)
        h, dh = prof(t)
        return a + t[:, None] * v + h[:, None] * n, v + dh[:, None] * n
    return sample(src)


def concat(curves, closed: bool = False, tol: float = 1e-7) -> SampledCurve:
    """Join arcs end to start; parameters are rescaled to equal subintervals."""
    m = len(curves)
    if m == 0:
        raise InputError("nothing to concatenate")
    scale = max(1.0, max(float(np.abs(c.points).max()) for c in curves))
    for c0, c1 in zip(curves[:-1], curves[1:]):
        if np.linalg.norm(c0.end - c1.start) > tol * scale:
            raise InputError("arcs do not meet end to start")
    if closed and np.linalg.norm(curves[-1].end - curves[0].start) > tol * scale:
        raise InputError("arcs do not close up")
    ts, ps, us = [], [], []
    for k, c in enumerate(curves):
        sl = slice(0, None) if k == 0 else slice(1, None)
        ts.append((k + c.t[sl]) / m)
        ps.append(c.points[sl])
        us.append(c.tangents[sl])
    src = None
    if all(c.source is not None for c in curves):
        srcs = [c.source for c in curves]

        def src(t, srcs=srcs):
            t = np.asarray(t, dtype=float)
            k = np.minimum((t * m).astype(int), m - 1)
            pts = np.empty((len(t), 2))
            der = np.empty((len(t), 2))
            for j in np.unique(k):
                sel = k == j
                p, d = srcs[j](t[sel] * m - j)
                pts[sel] = p
                der[sel] = d * m
            return pts, der
    pts = np.concatenate(ps)
    if closed:
        pts[-1] = pts[0]
    return SampledCurve(np.concatenate(ts), pts, np.concatenate(us), closed, src,
                        max(c.max_turn for c in curves))


def subarc(c: SampledCurve, t0: float, t1: float) -> SampledCurve:
    """Restriction of a sourced curve to [t0, t1], reparametrised to [0, 1]."""
    inner = c.source
    span = t1 - t0

    def src(t):
        p, d = inner(t0 + span * np.asarray(t, dtype=float))
        return p, d * span
    inside = (c.t > t0) & (c.t < t1)
    return sample(src, t0=(c.t[inside] - t0) / span, max_turn=c.max_turn)


# ---------------------------------------------------------------------------
# mapping

def push_forward(expr: MapExpr, c: SampledCurve, refine=None) -> SampledCurve:
    """Image curve: points by the map, tangents by its differential."""
    if c.source is None:
        raise InputError("push_forward needs a curve with a parametric source")
    for bad in expr.nonsmooth_points():
        if np.min(np.linalg.norm(c.points - np.asarray(bad), axis=1)) < 1e-12:
            raise NotDifferentiableHere(f"curve passes through the non-smooth point {bad}")
    inner = c.source

    def src(t):
        p, d = inner(t)
        return expr.apply(p), np.einsum("nij,nj->ni", expr.jacobian(p), d)

    cache = {}

    def scale(t):
        # source points and feature scales, cached by parameter value
        todo = np.array([x for x in np.unique(t) if x not in cache])
        if len(todo):
            q, _ = inner(todo)
            for x, qq, ss in zip(todo, q, expr.scale_at(q)):
                cache[x] = (qq, ss)
        q = np.array([cache[x][0] for x in t]).reshape(-1, 2)
        return q, np.array([cache[x][1] for x in t])

    def fine_enough(t0, t1, p0, p1):
        # chords in the source must stay below half the map's local feature scale
        q0, s0 = scale(t0)
        q1, s1 = scale(t1)
        chord = np.linalg.norm(q1 - q0, axis=1)
        bad = chord > 0.5 * np.minimum(s0, s1)
        if refine is not None:
            bad |= refine(t0, t1, p0, p1)
        return bad
    out = sample(src, closed=c.closed, t0=c.t, max_turn=c.max_turn, refine=fine_enough)
    if c.closed:
        pts = out.points.copy()
        pts[-1] = pts[0]
        out = replace(out, points=pts)
    return out


# ---------------------------------------------------------------------------
# turning

def total_turning(c: SampledCurve) -> float:
    """Continuous change of the tangent angle along the curve, in radians."""
    steps = c.tangent_steps()
    if np.any(np.abs(steps) >= math.pi / 2):
        raise ResidueTooLarge("tangent step too large to track continuously")
    return float(steps.sum())


class ResidueMonitor:
    """Running record of the residues seen by :func:`turning_number`."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.count = 0
        self.max = 0.0

    def record(self, r: float):
        self.count += 1
        self.max = max(self.max, float(r))


residue_monitor = ResidueMonitor()


def turning_number(c: SampledCurve, residue_bound: float = RESIDUE_BOUND) -> int:
    """Whitney index of a closed C1 immersed curve."""
    if not c.closed:
        raise InputError("turning_number needs a closed curve")
    w = total_turning(c) / (2 * math.pi)
    n = round(w)
    residue_monitor.record(abs(w - n))
    if abs(w - n) >= residue_bound:
        raise ResidueTooLarge(f"turning residue {abs(w - n):.3g} exceeds {residue_bound}")
    return int(n)


# ---------------------------------------------------------------------------
# crossings

@dataclass(frozen=True)
class CrossingEvent:
    t: float
    u: float
    point: tuple
    sign: int


def _cell_pairs(P, Q, h, origin):
    """Candidate segment pairs sharing a uniform grid cell."""
    def cells(S):
        lo = np.minimum(S[:-1], S[1:])
        hi = np.maximum(S[:-1], S[1:])
        i0 = np.floor((lo - origin) / h).astype(np.int64)
        i1 = np.floor((hi - origin) / h).astype(np.int64)
        nx = i1[:, 0] - i0[:, 0] + 1
        ny = i1[:, 1] - i0[:, 1] + 1
        cnt = nx * ny
        seg = np.repeat(np.arange(len(lo)), cnt)
        off = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        nyr = np.repeat(ny, cnt)
        ix = np.repeat(i0[:, 0], cnt) + off // nyr
        iy = np.repeat(i0[:, 1], cnt) + off % nyr
        return ix * 4_000_037 + iy, seg

    ka, sa = cells(P)
    kb, sb = cells(Q)
    order = np.argsort(kb, kind="stable")
    kb, sb = kb[order], sb[order]
    lo = np.searchsorted(kb, ka, "left")
    hi = np.searchsorted(kb, ka, "right")
    cnt = hi - lo
    ia = np.repeat(sa, cnt)
    start = np.repeat(lo, cnt)
    off = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    ib = sb[start + off]
    pair = np.unique(ia.astype(np.int64) * (len(Q) + 1) + ib)
    return pair // (len(Q) + 1), pair % (len(Q) + 1)


def _crossings(A: SampledCurve, B: SampledCurve, same: bool):
    P, Q = A.points, B.points
    lo = np.minimum(P.min(0), Q.min(0))
    hi = np.maximum(P.max(0), Q.max(0))
    if not same and (np.any(P.min(0) > Q.max(0)) or np.any(Q.min(0) > P.max(0))):
        return []
    seglen = np.concatenate([np.linalg.norm(np.diff(P, axis=0), axis=1),
                             np.linalg.norm(np.diff(Q, axis=0), axis=1)])
    h = max(float(np.median(seglen)) * 2, float(np.max(hi - lo)) / 4000, 1e-12)
    ia, ib = _cell_pairs(P, Q, h, lo)
    if same:
        n = len(P) - 1
        keep = ib > ia + 1
        if A.closed:
            keep &= ~((ia == 0) & (ib == n - 1))
        ia, ib = ia[keep], ib[keep]
    p, r = P[ia], P[ia + 1] - P[ia]
    q, d = Q[ib], Q[ib + 1] - Q[ib]
    den = _cross(r, d)
    qp = q - p
    lr = np.linalg.norm(r, axis=1)
    ld = np.linalg.norm(d, axis=1)
    par = np.abs(den) <= 1e-14 * lr * ld
    if np.any(par):
        # collinear overlaps of positive length cannot be counted
        colin = par & (np.abs(_cross(qp, r)) <= 1e-12 * lr * np.maximum(ld, 1e-300))
        for k in np.flatnonzero(colin):
            rr = r[k] @ r[k]
            s0 = (qp[k] @ r[k]) / rr
            s1 = ((qp[k] + d[k]) @ r[k]) / rr
            ov = min(1, max(s0, s1)) - max(0, min(s0, s1))
            if ov > 1e-9:
                raise NonTransverseContact("collinear overlap between curves")
    with np.errstate(divide="ignore", invalid="ignore"):
        s = _cross(qp, d) / den
        u = _cross(qp, r) / den
    hit = (~par) & (s >= 0) & (s < 1) & (u >= 0) & (u < 1)
    events = []
    scale = max(1.0, float(np.max(np.abs(np.concatenate([P, Q])))))
    endsA = [] if A.closed else [P[0], P[-1]]
    endsB = [] if B.closed else [Q[0], Q[-1]]
    for k in np.flatnonzero(hit):
        loc = p[k] + s[k] * r[k]
        nearA = any(np.linalg.norm(loc - e) <= 1e-9 * scale for e in endsA)
        nearB = any(np.linalg.norm(loc - e) <= 1e-9 * scale for e in endsB)
        if nearA and nearB:
            continue
        if nearA or nearB:
            raise NonTransverseContact("an endpoint of one curve lies on the other")
        sin = den[k] / (lr[k] * ld[k])
        if abs(sin) <= TRANSVERSE_TOL:
            raise NonTransverseContact("near-tangential crossing")
        i, j = ia[k], ib[k]
        tA = A.t[i] + s[k] * (A.t[i + 1] - A.t[i])
        tB = B.t[j] + u[k] * (B.t[j + 1] - B.t[j])
        events.append(CrossingEvent(float(tA), float(tB), (float(loc[0]), float(loc[1])),
                                    1 if den[k] > 0 else -1))
    events.sort(key=lambda e: (e.t, e.u))
    return events


def signed_intersections(A: SampledCurve, B: SampledCurve):
    """Algebraic intersection number A . B with sign det(t_A, t_B).

    Contacts at shared endpoints are excluded.
    """
    events = _crossings(A, B, same=False)
    return sum(e.sign for e in events), events


def self_crossings(c: SampledCurve):
    return _crossings(c, c, same=True)


def is_embedded(c: SampledCurve) -> bool:
    return not self_crossings(c)


# ---------------------------------------------------------------------------
# corners

def _trim_params(c: SampledCurve, radius: float):
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(c.points, axis=0), axis=1))])
    if s[-1] < 2.5 * radius:
        raise DegenerateEdge(f"edge of length {s[-1]:.3g} too short for corner radius {radius:.3g}")
    return float(np.interp(radius, s, c.t)), float(np.interp(s[-1] - radius, s, c.t))


def smooth_corners(arcs, radius: float, max_halvings: int = 12) -> SampledCurve:
    """Closed C1 loop from arcs meeting end to start, each corner rounded.

    Each arc loses arc length ``radius`` at both ends; the gap is bridged by a
    short Hermite blend turning through the same total angle as the removed
    pieces plus the exterior angle.  The radius is halved until that holds.
    """
    m = len(arcs)
    for i, arc in enumerate(arcs):
        nxt = arcs[(i + 1) % m]
        gap = np.linalg.norm(arc.end - nxt.start)
        if gap > 1e-6 * max(1.0, float(np.abs(arc.points).max())):
            raise InputError(f"arcs {i} and {(i + 1) % m} do not meet (gap {gap:.3g})")
        if float(arc.tangents[-1] @ nxt.tangents[0]) <= -1 + 1e-6:
            raise CuspCorner(f"corner {i} is a cusp")
    for _ in range(max_halvings):
        try:
            return _smooth_once(arcs, radius)
        except _BlendMismatch:
            radius *= 0.5
    raise CuspCorner("corner blends do not match the removed turning at any radius tried")


class _BlendMismatch(Exception):
    pass


def _smooth_once(arcs, radius):
    m = len(arcs)
    trims = [_trim_params(a, radius) for a in arcs]
    bodies = [subarc(a, ts, te) for a, (ts, te) in zip(arcs, trims)]
    pieces = []
    for i, arc in enumerate(arcs):
        nxt = arcs[(i + 1) % m]
        body, nbody = bodies[i], bodies[(i + 1) % m]
        pieces.append(body)
        p1, d1 = body.end, body.tangents[-1]
        p2, u2 = nbody.start, nbody.tangents[0]
        L = float(np.linalg.norm(p2 - p1))
        blend = hermite(p1, p2, L * d1, L * u2)
        tail = subarc(arc, trims[i][1], 1.0)
        head = subarc(nxt, 0.0, trims[(i + 1) % m][0])
        removed = (total_turning(tail) + float(signed_angle(arc.tangents[-1], nxt.tangents[0]))
                   + total_turning(head))
        if abs(total_turning(blend) - removed) > 1e-6:
            raise _BlendMismatch(i)
        pieces.append(blend)
    return concat(pieces, closed=True)


# ---------------------------------------------------------------------------
# arc spaces, twists and writhe

@dataclass(frozen=True)
class ArcSpace:
    """Embedded arcs from a to b whose end tangent is ``transport`` applied to the start tangent."""

    a: tuple
    b: tuple
    transport: np.ndarray = field(default_factory=lambda: np.eye(2))

    def __post_init__(self):
        a, b = as_point(self.a), as_point(self.b)
        if np.allclose(a, b):
            raise InputError("arc space needs distinct endpoints")
        if not np.linalg.det(self.transport) > 0:
            raise InputError("transport must preserve orientation")

    def check(self, x: SampledCurve, tol: float = TRANSPORT_TOL):
        scale = max(1.0, float(np.abs(x.points).max()))
        if (np.linalg.norm(x.start - as_point(self.a)) > tol * scale
                or np.linalg.norm(x.end - as_point(self.b)) > tol * scale):
            raise NotInArcSpace("arc endpoints do not match the arc space")
        want = _unit(np.asarray(self.transport) @ x.tangents[0])
        if np.linalg.norm(want - x.tangents[-1]) > tol:
            raise NotInArcSpace("end tangent is not the transported start tangent")


def _free_radius(x: SampledCurve, at_end: bool, radius: float):
    """Largest radius (halving from ``radius``) whose ball meets x in one radial end piece."""
    pts = x.points[::-1] if at_end else x.points
    e = pts[0]
    d = np.linalg.norm(pts - e, axis=1)
    for _ in range(40):
        inside = d < radius
        k = int(np.argmin(inside)) if not inside.all() else len(d)
        if 0 < k < len(d) and not inside[k:].any() and np.all(np.diff(d[: k + 1]) > 0):
            return radius
        radius *= 0.5
    raise NoFreeDisk("no ball around the endpoint isolates a radial end piece")


def add_twist(x: SampledCurve, k: int, radius: float | None = None) -> SampledCurve:
    """Insert ``k`` full positive twists in a small annulus around the terminal point."""
    if k == 0:
        return x
    if radius is None:
        radius = 0.2 * min(float(np.linalg.norm(x.end - x.start)), x.length())
    rho = _free_radius(x, True, radius)
    twist = AnnulusTwist(tuple(x.end), 0.4 * rho, 0.9 * rho, int(k))
    out = push_forward(twist, x)
    return replace(out, embedding_checked=x.embedding_checked)


def route_return_path(x: SampledCurve, variant: int = 0, rng=None) -> SampledCurve:
    """C1 path from x's end back to its start matching both tangents."""
    a, b = x.start, x.end
    ua, ub = x.tangents[0], x.tangents[-1]
    L = float(np.linalg.norm(b - a))
    back = (a - b) / L
    if variant == 0:
        side = np.array([-back[1], back[0]])
        mid = 0.5 * (a + b) - 1.5 * L * side
        return hermite_chain([b, mid, a], [L * ub, 2 * L * back, L * ua])
    rng = np.random.default_rng(variant) if rng is None else rng
    side = np.array([-back[1], back[0]]) * rng.choice([-1.0, 1.0])
    mid = 0.5 * (a + b) + L * rng.uniform(1.0, 3.0) * side + L * rng.uniform(-0.5, 0.5) * back
    return hermite_chain([b, mid, a], [L * rng.uniform(0.5, 2) * ub,
                                       L * rng.uniform(1, 3) * back,
                                       L * rng.uniform(0.5, 2) * ua])


def _check_return(r: SampledCurve, a, b, rho):
    inner = r.points[(r.t > 0.25) & (r.t < 0.75)]
    for e in (a, b):
        if len(inner) and np.min(np.linalg.norm(inner - e, axis=1)) < rho:
            raise ReturnPathCrossesEndpointBall("return path passes through an endpoint ball")


def writhe_difference(x: SampledCurve, y: SampledCurve, space: ArcSpace,
                      return_path: SampledCurve | None = None) -> int:
    """[x] - [y] in the affine Z-space of arcs in ``space``.

    y's end tangents are first rotated onto x's (principal angles, by
    rotations supported near the endpoints); both arcs are then closed by the
    same return path and the turning numbers compared.  A positive twist at
    the terminal point raises the class by one.
    """
    space.check(x)
    space.check(y)
    a, b = as_point(space.a), as_point(space.b)
    psi_a = float(signed_angle(y.tangents[0], x.tangents[0]))
    T = np.asarray(space.transport)
    psi_b = float(signed_angle(T @ y.tangents[0], T @ x.tangents[0]))
    if max(abs(psi_a), abs(psi_b)) > math.pi - 1e-9:
        raise AntipodalTangents("start tangents are antipodal; perturb one arc")
    rho = 0.25 * float(np.linalg.norm(b - a))
    align = DiskRotation(tuple(b), 0.5 * rho, rho, psi_b) @ DiskRotation(tuple(a), 0.5 * rho, rho, psi_a)
    y_star = push_forward(align, y)
    r = route_return_path(x) if return_path is None else return_path
    _check_return(r, a, b, 0.5 * rho)
    loop_x = concat([x, r], closed=True)
    loop_y = concat([y_star, r], closed=True)
    return turning_number(loop_y) - turning_number(loop_x)


def _radial_profile(c: SampledCurve, radius: float):
    """Angle about c.start as a function of distance, for the piece inside ``radius``."""
    e = c.start
    d = np.linalg.norm(c.points - e, axis=1)
    k = int(np.argmax(d >= radius))
    t_exit = brentq(lambda t: np.linalg.norm(c.source(np.array([t]))[0][0] - e) - radius,
                    c.t[k - 1], c.t[k], xtol=1e-15)
    t = np.linspace(0.0, t_exit, 801)
    pts, _ = c.source(t)
    v = pts - e
    s = np.linalg.norm(v, axis=1)
    ang = np.arctan2(v[:, 1], v[:, 0])
    ang[0] = math.atan2(c.tangents[0][1], c.tangents[0][0])
    ang = np.unwrap(ang)
    s[-1] = radius
    if not np.all(np.diff(s) > 0):
        raise NoFreeDisk("distance to the endpoint is not monotone inside the ball")
    return PchipInterpolator(s, ang), t_exit


def _cap_source(e, theta_t, theta_a, r):
    """Radial cap: template's angle inside r/2, the other arc's angle at r."""
    e = np.asarray(e, dtype=float)
    off = float(theta_a(0.0) - theta_t(0.0))
    shift = 2 * math.pi * round(off / (2 * math.pi))
    dth_t, dth_a = theta_t.derivative(), theta_a.derivative()

    def src(t):
        s = r * np.asarray(t, dtype=float)
        w = smoothstep((s - 0.5 * r) / (0.5 * r))
        dw = smoothstep_slope((s - 0.5 * r) / (0.5 * r)) / (0.5 * r)
        ta = theta_a(s) - shift
        tt = theta_t(s)
        th = tt + w * (ta - tt)
        dth = dth_t(s) + dw * (ta - tt) + w * (dth_a(s) - dth_t(s))
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
        perp = np.stack([-np.sin(th), np.cos(th)], axis=1)
        return e + s[:, None] * dirs, r * (dirs + (s * dth)[:, None] * perp)
    return src


def splice_near_endpoints(A: SampledCurve, template: SampledCurve, radius: float,
                          space: ArcSpace | None = None) -> SampledCurve:
    """Arc equal to ``template`` near both endpoints and to ``A`` away from them."""
    if np.linalg.norm(A.start - template.start) > 1e-9 or np.linalg.norm(A.end - template.end) > 1e-9:
        raise InputError("splice needs arcs with shared endpoints")
    r = min(radius, _free_radius(A, False, radius), _free_radius(A, True, radius),
            _free_radius(template, False, radius), _free_radius(template, True, radius))
    th_a0, ta0 = _radial_profile(A, r)
    th_t0, _ = _radial_profile(template, r)
    Ar = A.reversed()
    th_a1, ta1 = _radial_profile(Ar, r)
    th_t1, _ = _radial_profile(template.reversed(), r)
    cap0 = sample(_cap_source(A.start, th_t0, th_a0, r))
    mid = subarc(A, ta0, 1.0 - ta1)
    cap1 = sample(_cap_source(A.end, th_t1, th_a1, r)).reversed()
    out = concat([cap0, mid, cap1])
    if space is None:
        space = ArcSpace(tuple(template.start), tuple(template.end),
                         _transport_of(template))
    if writhe_difference(A, out, space) != 0:
        raise WritheChanged("splice changed the writhe; retry with a smaller radius")
    return out


def _transport_of(x: SampledCurve) -> np.ndarray:
    """Rotation carrying the start tangent of x to its end tangent."""
    ang = float(signed_angle(x.tangents[0], x.tangents[-1]))
    c, s = math.cos(ang), math.sin(ang)
    return np.array([[c, -s], [s, c]])
