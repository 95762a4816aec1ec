"""Orientation-preserving homeomorphisms of the plane as composable expressions.

Every map works on arrays of points of shape ``(N, 2)``: ``apply`` returns the
images and ``jacobian`` the ``(N, 2, 2)`` differentials.  Expressions are
immutable and evaluated lazily, which is what makes infinite products of
conjugated twists usable: only the (at most one) factor whose support contains
a given point is ever applied to it.

Composition is right to left, ``(f @ g).apply(p) == f.apply(g.apply(p))``,
and commutators follow ``[a, b] = a b a^-1 b^-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadRadii,
    InputError,
    NotDifferentiableHere,
    NotInjective,
    OverlappingSupports,
    SupportUnresolvable,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# smooth transition profile

def _sigma(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, and s(1/2) = 1/2."""
    t = np.asarray(t, dtype=float)
    a = _sigma(t)
    b = _sigma(1.0 - t)
    return a / (a + b)


def smoothstep_slope(t):
    t = np.asarray(t, dtype=float)
    a = _sigma(t)
    b = _sigma(1.0 - t)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    ai, bi = a[inside], b[inside]
    out[inside] = ai * bi * (1.0 / ti**2 + 1.0 / (1.0 - ti) ** 2) / (ai + bi) ** 2
    return out


MAX_SLOPE = float(smoothstep_slope(np.linspace(0.0, 1.0, 20001)).max())


# ---------------------------------------------------------------------------
# helpers

def as_point(p) -> np.ndarray:
    q = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(q)):
        raise InputError(f"non-finite point {p!r}")
    return q


def _as_points(pts) -> np.ndarray:
    return np.atleast_2d(np.asarray(pts, dtype=float))


def _rot(angle):
    """Stack of rotation matrices for an array of angles."""
    c, s = np.cos(angle), np.sin(angle)
    out = np.empty(np.shape(angle) + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def _eye(n):
    return np.broadcast_to(np.eye(2), (n, 2, 2)).copy()


# ---------------------------------------------------------------------------
# base class

class MapExpr:
    """Common interface.  Subclasses implement the four array methods."""

    def apply(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_inverse(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inverse(self) -> "MapExpr":
        return Inverse(self)

    def support(self):
        """Region outside which the map is the identity.

        One of ``("none",)``, ``("all",)``, ``("disk", c, r)`` or
        ``("annulus", c, r_in, r_out)``.
        """
        return ("all",)

    def moves(self, pts: np.ndarray) -> np.ndarray:
        return _in_support(self.support(), _as_points(pts))

    def nonsmooth_points(self) -> tuple:
        return ()

    def scale_at(self, pts: np.ndarray) -> np.ndarray:
        """Local feature length: chords shorter than half of it cannot skip structure."""
        return np.full(len(_as_points(pts)), np.inf)

    def __matmul__(self, other: "MapExpr") -> "MapExpr":
        return Compose((self, other))

    def __pow__(self, k: int) -> "MapExpr":
        return Power(self, int(k))

    @property
    def inv(self) -> "MapExpr":
        return self.inverse()


def _in_support(shape, pts):
    kind = shape[0]
    if kind == "none":
        return np.zeros(len(pts), dtype=bool)
    if kind == "all":
        return np.ones(len(pts), dtype=bool)
    c = np.asarray(shape[1])
    r = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
    if kind == "disk":
        return r < shape[2]
    return (r > shape[2]) & (r < shape[3])


def _outer_disk(shape):
    if shape[0] == "disk":
        return np.asarray(shape[1]), shape[2]
    if shape[0] == "annulus":
        return np.asarray(shape[1]), shape[3]
    return None


# ---------------------------------------------------------------------------
# primitives

@dataclass(frozen=True)
class Identity(MapExpr):
    def apply(self, pts):
        return _as_points(pts).copy()

    apply_inverse = apply

    def jacobian(self, pts):
        return _eye(len(_as_points(pts)))

    def inverse(self):
        return self

    def support(self):
        return ("none",)


@dataclass(frozen=True)
class Translation(MapExpr):
    vector: tuple

    def apply(self, pts):
        return _as_points(pts) + np.asarray(self.vector, dtype=float)

    def apply_inverse(self, pts):
        return _as_points(pts) - np.asarray(self.vector, dtype=float)

    def jacobian(self, pts):
        return _eye(len(_as_points(pts)))

    def inverse(self):
        return Translation(tuple(-np.asarray(self.vector, dtype=float)))


@dataclass(frozen=True)
class Dilation(MapExpr):
    factor: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.factor > 0:
            raise InputError("dilation factor must be positive")

    def apply(self, pts):
        c = np.asarray(self.center, dtype=float)
        return c + self.factor * (_as_points(pts) - c)

    def apply_inverse(self, pts):
        c = np.asarray(self.center, dtype=float)
        return c + (_as_points(pts) - c) / self.factor

    def jacobian(self, pts):
        return self.factor * _eye(len(_as_points(pts)))

    def inverse(self):
        return Dilation(1.0 / self.factor, self.center)


@dataclass(frozen=True)
class Rotation(MapExpr):
    angle: float
    center: tuple = (0.0, 0.0)

    def apply(self, pts):
        c = np.asarray(self.center, dtype=float)
        return c + (_as_points(pts) - c) @ _rot(self.angle).T

    def apply_inverse(self, pts):
        c = np.asarray(self.center, dtype=float)
        return c + (_as_points(pts) - c) @ _rot(-self.angle).T

    def jacobian(self, pts):
        return np.broadcast_to(_rot(self.angle), (len(_as_points(pts)), 2, 2)).copy()

    def inverse(self):
        return Rotation(-self.angle, self.center)


class _RadialRotation(MapExpr):
    """Map rotating each circle about ``center`` by an angle depending on radius."""

    center: tuple

    def _turns(self):
        return 1.0

    def scale_at(self, pts):
        pts = _as_points(pts)
        c = np.asarray(self.center, dtype=float)
        r = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
        gap = np.maximum(np.maximum(self.r_in - r, r - self.r_out), 0.0)
        width = (self.r_out - self.r_in) / (4.0 * max(1.0, self._turns()))
        return np.maximum(width, gap)

    def _angle(self, r):
        raise NotImplementedError

    def _angle_slope(self, r):
        raise NotImplementedError

    def _rotate(self, pts, sign):
        pts = _as_points(pts)
        c = np.asarray(self.center, dtype=float)
        d = pts - c
        r = np.hypot(d[:, 0], d[:, 1])
        phi = sign * self._angle(r)
        R = _rot(phi)
        return c + np.einsum("nij,nj->ni", R, d)

    def apply(self, pts):
        return self._rotate(pts, 1.0)

    def apply_inverse(self, pts):
        return self._rotate(pts, -1.0)

    def jacobian(self, pts):
        # J = R(phi) (I + phi'(r) J0 d d^T / r), determinant 1
        pts = _as_points(pts)
        c = np.asarray(self.center, dtype=float)
        d = pts - c
        r = np.hypot(d[:, 0], d[:, 1])
        phi = self._angle(r)
        dphi = self._angle_slope(r)
        safe = np.where(r > 0, r, 1.0)
        coef = np.where(r > 0, dphi / safe, 0.0)
        J0d = np.stack([-d[:, 1], d[:, 0]], axis=1)
        inner = _eye(len(pts)) + coef[:, None, None] * J0d[:, :, None] * d[:, None, :]
        return np.einsum("nij,njk->nik", _rot(phi), inner)


@dataclass(frozen=True)
class AnnulusTwist(_RadialRotation):
    """Dehn twist of power ``k``: the circle of radius r turns by 2 pi k s(u)."""

    center: tuple
    r_in: float
    r_out: float
    k: int = 1

    def __post_init__(self):
        if not (0 < self.r_in < self.r_out):
            raise BadRadii(f"need 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    def _u(self, r):
        return (r - self.r_in) / (self.r_out - self.r_in)

    def _angle(self, r):
        return TWO_PI * self.k * smoothstep(self._u(r))

    def _angle_slope(self, r):
        return TWO_PI * self.k * smoothstep_slope(self._u(r)) / (self.r_out - self.r_in)

    def _turns(self):
        return abs(self.k)

    def inverse(self):
        return AnnulusTwist(self.center, self.r_in, self.r_out, -self.k)

    def support(self):
        if self.k == 0:
            return ("none",)
        return ("annulus", tuple(self.center), self.r_in, self.r_out)


@dataclass(frozen=True)
class DiskRotation(_RadialRotation):
    """Rigid rotation by ``angle`` inside ``r_in``, fading to the identity at ``r_out``."""

    center: tuple
    r_in: float
    r_out: float
    angle: float

    def __post_init__(self):
        if not (0 < self.r_in < self.r_out):
            raise BadRadii(f"need 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    def _u(self, r):
        return (r - self.r_in) / (self.r_out - self.r_in)

    def _angle(self, r):
        return self.angle * (1.0 - smoothstep(self._u(r)))

    def _angle_slope(self, r):
        return -self.angle * smoothstep_slope(self._u(r)) / (self.r_out - self.r_in)

    def _turns(self):
        return abs(self.angle) / TWO_PI

    def inverse(self):
        return DiskRotation(self.center, self.r_in, self.r_out, -self.angle)

    def support(self):
        return ("disk", tuple(self.center), self.r_out)


@dataclass(frozen=True)
class StepTranslation(MapExpr):
    """Identity for x < x_lo, translation by ``shift`` for x > x_hi, smooth between."""

    shift: tuple
    x_lo: float
    x_hi: float

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise InputError("StepTranslation needs x_lo < x_hi")
        sx = float(self.shift[0])
        if sx < 0 and abs(sx) * MAX_SLOPE / (self.x_hi - self.x_lo) >= 1:
            raise NotInjective("transition band too narrow for a backward shift")

    @property
    def _width(self):
        return self.x_hi - self.x_lo

    def _s(self, x):
        return smoothstep((x - self.x_lo) / self._width)

    def apply(self, pts):
        pts = _as_points(pts)
        return pts + self._s(pts[:, 0])[:, None] * np.asarray(self.shift, dtype=float)

    def apply_inverse(self, pts):
        pts = _as_points(pts)
        sx, sy = float(self.shift[0]), float(self.shift[1])
        xp = pts[:, 0]
        if sx == 0.0:
            x = xp.copy()
        else:
            x = np.where(xp <= self.x_lo, xp, xp - sx)
            band = (xp > self.x_lo) & (xp < self.x_hi + sx)
            if band.any():
                x[band] = self._invert_band(xp[band], sx)
        y = pts[:, 1] - sy * self._s(x)
        return np.stack([x, y], axis=1)

    def _invert_band(self, xp, sx):
        # x + sx s(x) is strictly increasing: bracket, bisect, polish
        lo = xp - max(sx, 0.0)
        hi = xp - min(sx, 0.0)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            f = mid + sx * self._s(mid) - xp
            lo = np.where(f < 0, mid, lo)
            hi = np.where(f < 0, hi, mid)
        x = 0.5 * (lo + hi)
        for _ in range(2):
            f = x + sx * self._s(x) - xp
            fp = 1.0 + sx * smoothstep_slope((x - self.x_lo) / self._width) / self._width
            x = x - f / fp
        return x

    def scale_at(self, pts):
        pts = _as_points(pts)
        x = pts[:, 0]
        gap = np.maximum(np.maximum(self.x_lo - x, x - self.x_hi), 0.0)
        mag = float(np.hypot(*self.shift))
        return np.maximum(self._width / (4.0 * max(1.0, mag / self._width)), gap)

    def jacobian(self, pts):
        pts = _as_points(pts)
        ds = smoothstep_slope((pts[:, 0] - self.x_lo) / self._width) / self._width
        J = _eye(len(pts))
        J[:, 0, 0] += self.shift[0] * ds
        J[:, 1, 0] += self.shift[1] * ds
        return J


@dataclass(frozen=True)
class StripShear(MapExpr):
    """(x, y) -> (x + amplitude * bump(y), y) with the bump supported in [y_lo, y_hi]."""

    y_lo: float
    y_hi: float
    amplitude: float

    def __post_init__(self):
        if not self.y_lo < self.y_hi:
            raise InputError("StripShear needs y_lo < y_hi")

    def _u(self, y):
        return (y - self.y_lo) / (self.y_hi - self.y_lo)

    def displacement(self, y):
        u = self._u(np.asarray(y, dtype=float))
        return self.amplitude * smoothstep(2 * u) * smoothstep(2 - 2 * u)

    def _slope(self, y):
        u = self._u(np.asarray(y, dtype=float))
        w = self.y_hi - self.y_lo
        a = smoothstep(2 * u)
        b = smoothstep(2 - 2 * u)
        da = 2 * smoothstep_slope(2 * u) / w
        db = -2 * smoothstep_slope(2 - 2 * u) / w
        return self.amplitude * (da * b + a * db)

    def scale_at(self, pts):
        y = _as_points(pts)[:, 1]
        w = self.y_hi - self.y_lo
        gap = np.maximum(np.maximum(self.y_lo - y, y - self.y_hi), 0.0)
        return np.maximum(w / (8.0 * max(1.0, 4 * abs(self.amplitude) / w)), gap)

    def apply(self, pts):
        pts = _as_points(pts).copy()
        pts[:, 0] += self.displacement(pts[:, 1])
        return pts

    def apply_inverse(self, pts):
        pts = _as_points(pts).copy()
        pts[:, 0] -= self.displacement(pts[:, 1])
        return pts

    def jacobian(self, pts):
        pts = _as_points(pts)
        J = _eye(len(pts))
        J[:, 0, 1] = self._slope(pts[:, 1])
        return J

    def inverse(self):
        return StripShear(self.y_lo, self.y_hi, -self.amplitude)


# ---------------------------------------------------------------------------
# expression nodes

@dataclass(frozen=True)
class Compose(MapExpr):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def apply(self, pts):
        out = _as_points(pts)
        for part in reversed(self.parts):
            out = part.apply(out)
        return out.copy() if not self.parts else out

    def apply_inverse(self, pts):
        out = _as_points(pts)
        for part in self.parts:
            out = part.apply_inverse(out)
        return out.copy() if not self.parts else out

    def jacobian(self, pts):
        pts = _as_points(pts)
        J = _eye(len(pts))
        for part in reversed(self.parts):
            J = np.einsum("nij,njk->nik", part.jacobian(pts), J)
            pts = part.apply(pts)
        return J

    def scale_at(self, pts):
        return _chain_scale(reversed(self.parts), _as_points(pts))

    def inverse(self):
        return Compose(tuple(p.inverse() for p in reversed(self.parts)))

    def support(self):
        shapes = [p.support() for p in self.parts]
        shapes = [s for s in shapes if s[0] != "none"]
        if not shapes:
            return ("none",)
        if len(shapes) == 1:
            return shapes[0]
        return ("all",)

    def nonsmooth_points(self):
        return tuple(q for p in self.parts for q in p.nonsmooth_points())


@dataclass(frozen=True)
class Inverse(MapExpr):
    child: MapExpr

    def apply(self, pts):
        return self.child.apply_inverse(pts)

    def apply_inverse(self, pts):
        return self.child.apply(pts)

    def jacobian(self, pts):
        pre = self.child.apply_inverse(pts)
        return np.linalg.inv(self.child.jacobian(pre))

    def inverse(self):
        return self.child

    def scale_at(self, pts):
        pre = self.child.apply_inverse(pts)
        J = self.child.jacobian(pre)
        return self.child.scale_at(pre) * _min_stretch(J)

    def support(self):
        return self.child.support()

    def nonsmooth_points(self):
        return self.child.nonsmooth_points()


@dataclass(frozen=True)
class Power(MapExpr):
    child: MapExpr
    k: int

    def apply(self, pts):
        out = _as_points(pts)
        step = self.child.apply if self.k >= 0 else self.child.apply_inverse
        for _ in range(abs(self.k)):
            out = step(out)
        return out.copy() if self.k == 0 else out

    def apply_inverse(self, pts):
        return Power(self.child, -self.k).apply(pts)

    def jacobian(self, pts):
        pts = _as_points(pts)
        J = _eye(len(pts))
        step = self.child if self.k >= 0 else Inverse(self.child)
        for _ in range(abs(self.k)):
            J = np.einsum("nij,njk->nik", step.jacobian(pts), J)
            pts = step.apply(pts)
        return J

    def inverse(self):
        return Power(self.child, -self.k)

    def scale_at(self, pts):
        step = self.child if self.k >= 0 else Inverse(self.child)
        return _chain_scale([step] * abs(self.k), _as_points(pts))

    def support(self):
        return ("none",) if self.k == 0 else self.child.support()

    def nonsmooth_points(self):
        return self.child.nonsmooth_points()


ALL = "all"
NONNEGATIVE = "nonnegative"


@dataclass(frozen=True)
class ConjProduct(MapExpr):
    """Product over n of conjugator^n . core . conjugator^-n (disjoint supports).

    A support locator derived from the conjugator's geometry names, for each
    point, the single index whose factor may act there; every candidate is
    then verified by pulling the point back into the core's support.
    """

    core: MapExpr
    conjugator: MapExpr
    indices: str = ALL

    def __post_init__(self):
        if self.indices not in (ALL, NONNEGATIVE):
            raise InputError(f"unknown index set {self.indices!r}")
        object.__setattr__(self, "_locator", self._build_locator())

    def _build_locator(self):
        shape = self.core.support()
        if shape[0] == "none":
            return lambda pts: np.full(len(pts), np.iinfo(np.int64).min)
        disk = _outer_disk(shape)
        if disk is None:
            raise SupportUnresolvable("core must have bounded support")
        c, rad = disk
        conj = self.conjugator
        if isinstance(conj, Dilation):
            if not np.allclose(conj.center, c):
                raise SupportUnresolvable("dilation must be centred on the core support")
            if shape[0] != "annulus":
                raise SupportUnresolvable("dilation conjugator needs an annular core")
            lam = conj.factor
            r_in, r_out = shape[2], shape[3]
            if lam == 1 or r_out / r_in >= max(lam, 1 / lam):
                raise OverlappingSupports(
                    f"annulus ratio {r_out / r_in:g} is not below dilation factor {lam:g}")
            log_lam = math.log(lam)

            def locate(pts):
                r = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
                out = np.full(len(pts), np.iinfo(np.int64).min)
                pos = r > 0
                with np.errstate(divide="ignore"):
                    out[pos] = np.floor(np.log(r[pos] / r_in) / log_lam).astype(np.int64)
                return out
            return locate

        if isinstance(conj, Translation):
            v = np.asarray(conj.vector, dtype=float)
        elif isinstance(conj, StepTranslation):
            if self.indices != NONNEGATIVE:
                raise SupportUnresolvable("step translation conjugator needs nonnegative indices")
            v = np.asarray(conj.shift, dtype=float)
            if not (v[0] > 0 and c[0] - rad > conj.x_hi):
                raise SupportUnresolvable("core support must sit in the translating region")
        else:
            raise SupportUnresolvable(f"no support locator for {type(conj).__name__}")
        vv = float(v @ v)
        if not math.sqrt(vv) > 2 * rad:
            raise OverlappingSupports("translates of the core support overlap")

        def locate(pts):
            return np.rint(((pts - c) @ v) / vv).astype(np.int64)
        return locate

    def active_index(self, pts):
        """Index of the factor acting at each point, or None-sentinel (int64 min)."""
        pts = _as_points(pts)
        sentinel = np.iinfo(np.int64).min
        idx = self._locator(pts)
        if self.indices == NONNEGATIVE:
            idx = np.where(idx < 0, sentinel, idx)
        for n in np.unique(idx[idx != sentinel]):
            m = idx == n
            w = Power(self.conjugator, -int(n)).apply(pts[m])
            ok = self.core.moves(w)
            sub = idx[m]
            sub[~ok] = sentinel
            idx[m] = sub
        return idx

    def _apply_with(self, core, pts):
        pts = _as_points(pts)
        out = pts.copy()
        idx = self.active_index(pts)
        sentinel = np.iinfo(np.int64).min
        for n in np.unique(idx[idx != sentinel]):
            m = idx == n
            n = int(n)
            w = Power(self.conjugator, -n).apply(pts[m])
            out[m] = Power(self.conjugator, n).apply(core.apply(w))
        return out

    def apply(self, pts):
        return self._apply_with(self.core, pts)

    def apply_inverse(self, pts):
        return self._apply_with(Inverse(self.core), pts)

    def jacobian(self, pts):
        pts = _as_points(pts)
        J = _eye(len(pts))
        idx = self.active_index(pts)
        sentinel = np.iinfo(np.int64).min
        for n in np.unique(idx[idx != sentinel]):
            m = idx == n
            n = int(n)
            back = Power(self.conjugator, -n)
            w = back.apply(pts[m])
            cw = self.core.apply(w)
            Jb = back.jacobian(pts[m])
            Jc = self.core.jacobian(w)
            Jf = Power(self.conjugator, n).jacobian(cw)
            J[m] = np.einsum("nij,njk,nkl->nil", Jf, Jc, Jb)
        return J

    def inverse(self):
        return ConjProduct(Inverse(self.core), self.conjugator, self.indices)

    def scale_at(self, pts):
        pts = _as_points(pts)
        out = np.full(len(pts), np.inf)
        base = self._locator(pts)
        sentinel = np.iinfo(np.int64).min
        for shift in (-1, 0, 1):
            idx = np.where(base == sentinel, sentinel, base + shift)
            if self.indices == NONNEGATIVE:
                idx = np.where(idx < 0, sentinel, idx)
            for n in np.unique(idx[idx != sentinel]):
                m = idx == n
                back = Power(self.conjugator, -int(n))
                w = back.apply(pts[m])
                J = back.jacobian(pts[m])
                out[m] = np.minimum(out[m], self.core.scale_at(w) / _max_stretch(J))
        if self.nonsmooth_points():
            c = np.asarray(self.nonsmooth_points()[0])
            out = np.minimum(out, np.maximum(np.hypot(*(pts - c).T), 1e-12))
        return out

    def support(self):
        return ("all",)

    def moves(self, pts):
        return self.active_index(pts) != np.iinfo(np.int64).min

    def nonsmooth_points(self):
        # factors accumulate at the dilation centre when both directions are taken
        if isinstance(self.conjugator, Dilation) and self.indices == ALL:
            return (tuple(float(x) for x in self.conjugator.center),)
        return ()


def _singular_values(J):
    """Closed-form singular values of a stack of 2x2 matrices."""
    f2 = 0.5 * np.einsum("nij,nij->n", J, J)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    root = np.sqrt(np.maximum(f2 * f2 - det * det, 0.0))
    big = np.sqrt(f2 + root)
    return big, np.abs(det) / np.maximum(big, 1e-300)


def _max_stretch(J):
    return _singular_values(J)[0]


def _min_stretch(J):
    return _singular_values(J)[1]


def _chain_scale(parts, pts):
    """Feature scale of a composition, pulled back to source coordinates."""
    out = np.full(len(pts), np.inf)
    J = _eye(len(pts))
    for part in parts:
        out = np.minimum(out, part.scale_at(pts) / _max_stretch(J))
        J = np.einsum("nij,njk->nik", part.jacobian(pts), J)
        pts = part.apply(pts)
    return out


# ---------------------------------------------------------------------------
# constructors and single-point API

def make_annulus_twist(center, r_in, r_out, k) -> AnnulusTwist:
    return AnnulusTwist(tuple(as_point(center)), float(r_in), float(r_out), int(k))


def make_step_translation(shift, x_lo, x_hi) -> StepTranslation:
    return StepTranslation(tuple(as_point(shift)), float(x_lo), float(x_hi))


def lazy_twist_product(core: MapExpr, conjugator: MapExpr, indices: str = ALL) -> ConjProduct:
    return ConjProduct(core, conjugator, indices)


def commutator(a: MapExpr, b: MapExpr) -> MapExpr:
    return Compose((a, b, a.inverse(), b.inverse()))


def evaluate(expr: MapExpr, p) -> np.ndarray:
    """Image of a single point."""
    return expr.apply(as_point(p)[None, :])[0]


def differential(expr: MapExpr, p, tol: float = 1e-12) -> np.ndarray:
    """Jacobian at a single point; refuses declared non-smooth loci."""
    q = as_point(p)
    for bad in expr.nonsmooth_points():
        if np.hypot(*(q - np.asarray(bad))) <= tol:
            raise NotDifferentiableHere(f"{type(expr).__name__} is only C0 at {bad}")
    J = expr.jacobian(q[None, :])[0]
    if not np.linalg.det(J) > 0:
        raise InputError("differential is not orientation preserving")
    return J


def finite_difference_jacobian(expr: MapExpr, p, h: float = 1e-6) -> np.ndarray:
    q = as_point(p)
    probes = np.array([q + [h, 0], q - [h, 0], q + [0, h], q - [0, h]])
    img = expr.apply(probes)
    return np.column_stack([(img[0] - img[1]) / (2 * h), (img[2] - img[3]) / (2 * h)])


# ---------------------------------------------------------------------------
# relators

@dataclass(frozen=True)
class RelatorReport:
    passed: bool
    max_displacement: float
    n_samples: int
    tol: float


def standard_samples(n: int = 200, r_min: float = 0.1, r_max: float = 50.0, seed: int = 0):
    """Seeded points with log-uniform radius in [r_min, r_max] and uniform angle."""
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(r_min), math.log(r_max), n))
    a = rng.uniform(0.0, TWO_PI, n)
    return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)


def relator_check(action, samples=None, tol: float = 1e-9) -> RelatorReport:
    """Largest displacement of the surface relator of ``action`` over ``samples``.

    Samples within 1e-6 of a declared non-smooth point are skipped.
    """
    pts = standard_samples() if samples is None else _as_points(samples)
    for q in action.nonsmooth:
        pts = pts[np.linalg.norm(pts - np.asarray(q), axis=1) > 1e-6]
    W = action.relator()
    disp = float(np.max(np.linalg.norm(W.apply(pts) - pts, axis=1))) if len(pts) else 0.0
    return RelatorReport(disp < tol, disp, len(pts), tol)
