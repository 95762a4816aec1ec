"""Lifting plane maps to the universal cover of a punctured plane.

A point of the cover is a base point together with a continuous argument
about the center (:class:`LiftedPoint`).  In ``"puncture"`` mode the center is
a common fixed point of the maps; in ``"infinity"`` mode the center is the
origin and all tracked points stay outside a forbidden disk of radius ``R``,
so only the germs of the maps near infinity matter.

A map ``g`` is lifted by fixing a reference path from the basepoint ``z0`` to
``g(z0)``.  To apply the lift at a lifted point we join ``z0`` to it by a
polar path ``P`` (log-linear radius, linear angle), push ``P`` through ``g`` and
continue the argument along ``reference * g(P)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import SampledCurve, from_function, push_forward, sample
from .errors import (
    ForbiddenRegionViolated,
    InputError,
    NotARelator,
    PathHitsCenter,
    ResidueTooLarge,
)
from .planemap import MapExpr, as_point

TWO_PI = 2.0 * math.pi
RESIDUE_BOUND = 0.05
CENTER_TOL = 1e-9
RETURN_TOL = 1e-6


def _principal(x):
    return (x + math.pi) % TWO_PI - math.pi


def arg_continuation(path: SampledCurve, initial_angle: float, center=(0.0, 0.0)) -> float:
    """Final value of the argument about ``center`` continued along ``path``.

    ``initial_angle`` must be a lift of the argument of ``path.start``; the
    result differs from it by the total angle swept.
    """
    c = as_point(center)
    v = path.points - c
    r = np.hypot(v[:, 0], v[:, 1])
    if r.min() < CENTER_TOL:
        raise PathHitsCenter("path passes within 1e-9 of the center")
    ang = np.arctan2(v[:, 1], v[:, 0])
    steps = _principal(np.diff(ang))
    if np.any(np.abs(steps) >= math.pi / 2):
        if path.source is None:
            raise ResidueTooLarge("argument step too large and no source to resample")
        path = sample(path.source, t0=path.t, refine=_angle_refiner(c))
        return arg_continuation(path, initial_angle, c)
    start = math.atan2(v[0, 1], v[0, 0])
    off = initial_angle - start
    if abs(_principal(off)) > 1e-6:
        raise InputError("initial angle is not a lift of the start point's argument")
    return float(initial_angle + steps.sum())


def _angle_refiner(c, max_step: float = 0.5):
    def refine(t0, t1, p0, p1):
        a0 = np.arctan2(p0[:, 1] - c[1], p0[:, 0] - c[0])
        a1 = np.arctan2(p1[:, 1] - c[1], p1[:, 0] - c[0])
        return np.abs(_principal(a1 - a0)) > max_step
    return refine


def polar_path(center, p, angle_p: float, q, angle_q: float) -> SampledCurve:
    """Path from p to q, radius log-linear and argument linear between the given lifts."""
    c = as_point(center)
    r0 = float(np.linalg.norm(as_point(p) - c))
    r1 = float(np.linalg.norm(as_point(q) - c))
    if min(r0, r1) < CENTER_TOL:
        raise PathHitsCenter("polar path endpoint at the center")
    lr0, lr1 = math.log(r0), math.log(r1)
    dl, da = lr1 - lr0, angle_q - angle_p
    if abs(dl) < 1e-15 and abs(da) < 1e-15:
        # degenerate: constant path, parametrized as a tiny radial wiggle-free step
        dl = 1e-15

    def f(t):
        r = np.exp(lr0 + t * dl)
        a = angle_p + t * da
        return c + r[:, None] * np.stack([np.cos(a), np.sin(a)], axis=1)

    def df(t):
        r = np.exp(lr0 + t * dl)
        a = angle_p + t * da
        e = np.stack([np.cos(a), np.sin(a)], axis=1)
        n = np.stack([-np.sin(a), np.cos(a)], axis=1)
        return r[:, None] * (dl * e + da * n)
    out = from_function(f, df, n0=max(17, int(8 * abs(da)) + 1))
    # pin the endpoints exactly
    pts = out.points.copy()
    pts[0], pts[-1] = as_point(p), as_point(q)
    return SampledCurve(out.t, pts, out.tangents, False, out.source, out.max_turn)


@dataclass(frozen=True)
class LiftedPoint:
    base: np.ndarray
    angle: float


@dataclass(frozen=True)
class LiftContext:
    """Where and how to lift.

    ``mode`` is ``"puncture"`` (center fixed by every map) or ``"infinity"``
    (center the origin, tracked points kept outside the disk of radius ``R``).
    """

    mode: str
    center: tuple = (0.0, 0.0)
    R: float = 0.0
    z0: tuple = (1.0, 0.0)
    theta0: float | None = None
    fixed_by_construction: tuple = field(default=())

    def __post_init__(self):
        if self.mode not in ("puncture", "infinity"):
            raise InputError(f"unknown lift mode {self.mode!r}")
        if self.mode == "infinity" and not self.R > 0:
            raise InputError("infinity mode needs a forbidden radius R > 0")
        if self.theta0 is None:
            v = as_point(self.z0) - as_point(self.center)
            object.__setattr__(self, "theta0", math.atan2(v[1], v[0]))
        self._check_outside(as_point(self.z0), "basepoint")

    @property
    def base(self) -> LiftedPoint:
        return LiftedPoint(as_point(self.z0), float(self.theta0))

    def _radius(self, p):
        return float(np.linalg.norm(as_point(p) - as_point(self.center)))

    def _check_outside(self, p, what):
        r = self._radius(p)
        if self.mode == "infinity" and r <= self.R:
            raise ForbiddenRegionViolated(
                f"{what} at radius {r:.4g} inside the forbidden disk R={self.R}; increase R")
        if r < CENTER_TOL:
            raise PathHitsCenter(f"{what} at the center")

    def check_map(self, g: MapExpr):
        """Validate that g can be lifted in this context."""
        c = as_point(self.center)
        if self.mode == "puncture":
            if any(np.allclose(c, q) for q in g.nonsmooth_points()) or \
                    any(np.allclose(c, q) for q in self.fixed_by_construction):
                return
            if np.linalg.norm(g.apply(c[None])[0] - c) > 1e-9:
                raise ForbiddenRegionViolated("map does not fix the puncture")
        else:
            pre = g.apply_inverse(c[None])[0]
            if np.linalg.norm(pre - c) >= self.R:
                raise ForbiddenRegionViolated(
                    f"map sends a point outside radius R={self.R} to the center; increase R")

    def reference_path(self, g: MapExpr) -> SampledCurve:
        z0 = as_point(self.z0)
        gz = g.apply(z0[None])[0]
        self._check_outside(gz, "image of the basepoint")
        v = gz - as_point(self.center)
        a1 = self.theta0 + _principal(math.atan2(v[1], v[0]) - self.theta0)
        return polar_path(self.center, z0, self.theta0, gz, a1)

    def reference_angle(self, g: MapExpr) -> float:
        """Lifted angle of g(z0) at the end of the reference path."""
        gz = g.apply(as_point(self.z0)[None])[0]
        self._check_outside(gz, "image of the basepoint")
        v = gz - as_point(self.center)
        return self.theta0 + _principal(math.atan2(v[1], v[0]) - self.theta0)


def _connecting_path(ctx: LiftContext, zt: LiftedPoint) -> SampledCurve:
    return polar_path(ctx.center, ctx.z0, ctx.theta0, zt.base, zt.angle)


def lifted_apply(ctx: LiftContext, g: MapExpr, zt: LiftedPoint,
                 path: SampledCurve | None = None) -> LiftedPoint:
    """Image of ``zt`` under the lift of ``g`` fixed by its reference path.

    ``path`` optionally overrides the connecting path from z0 to zt.base (it
    must end at the lifted point ``zt``); the result does not depend on it.
    """
    ctx.check_map(g)
    ctx._check_outside(zt.base, "point")
    P = _connecting_path(ctx, zt) if path is None else path
    gP = push_forward(g, P, refine=_angle_refiner(as_point(ctx.center)))
    start = ctx.reference_angle(g)
    angle = arg_continuation(gP, start, ctx.center)
    base = gP.end.copy()
    ctx._check_outside(base, "image point")
    return LiftedPoint(base, angle)


def lifted_apply_inverse(ctx: LiftContext, g: MapExpr, zt: LiftedPoint) -> LiftedPoint:
    """Image of ``zt`` under the inverse of the lift of ``g``.

    The lift commutes with the deck group, so a trial lift of g^-1(base) is
    corrected by the whole number of turns separating its image from ``zt``.
    """
    u = g.apply_inverse(np.asarray(zt.base)[None])[0]
    ctx._check_outside(u, "preimage point")
    v = u - as_point(ctx.center)
    guess = LiftedPoint(u, ctx.theta0 + _principal(math.atan2(v[1], v[0]) - ctx.theta0))
    img = lifted_apply(ctx, g, guess)
    turns = (zt.angle - img.angle) / TWO_PI
    m = round(turns)
    if abs(turns - m) >= RESIDUE_BOUND or np.linalg.norm(img.base - zt.base) > RETURN_TOL * (
            1 + np.linalg.norm(zt.base)):
        raise ResidueTooLarge("inverse lift did not land in the fiber of the target")
    return LiftedPoint(u, guess.angle + TWO_PI * m)


def apply_word(ctx: LiftContext, word, assignment, zt: LiftedPoint | None = None) -> LiftedPoint:
    """Apply a word of ``(name, exponent)`` tokens, rightmost letter first."""
    zt = ctx.base if zt is None else zt
    for name, e in reversed(list(word)):
        g = assignment[name]
        step = lifted_apply if e > 0 else lifted_apply_inverse
        for _ in range(abs(int(e))):
            zt = step(ctx, g, zt)
    return zt


def deck_translation(ctx: LiftContext, word, action) -> int:
    """Number of turns by which the lifted relator word moves the base lift."""
    assignment = action.assignment if hasattr(action, "assignment") else action
    out = apply_word(ctx, word, assignment)
    z0 = as_point(ctx.z0)
    if np.linalg.norm(out.base - z0) > RETURN_TOL * (1 + np.linalg.norm(z0)):
        raise NotARelator(f"word moves the basepoint to {out.base.tolist()}",
                          lhs=out.base.tolist(), rhs=z0.tolist())
    turns = (out.angle - ctx.theta0) / TWO_PI
    m = round(turns)
    if abs(turns - m) >= RESIDUE_BOUND:
        raise ResidueTooLarge(f"deck residue {abs(turns - m):.3g} exceeds {RESIDUE_BOUND}")
    return int(m)


def deck_turns(ctx: LiftContext, word, action) -> float:
    """Unrounded version of :func:`deck_translation`, for diagnostics."""
    assignment = action.assignment if hasattr(action, "assignment") else action
    out = apply_word(ctx, word, assignment)
    return (out.angle - ctx.theta0) / TWO_PI
