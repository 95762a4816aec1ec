"""Named constructions of surface-group actions on the plane.

``bestvina`` and ``genus2_smooth`` carry nonzero Euler numbers; the torus
recipes (``torus_shear``, ``commuting_rotation_twist``, ``free_translations``
and the seeded ``torus_twist_chain``) are C1 actions of Z^2 and have Euler
number zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cover import LiftContext
from .curve import SampledCurve, bump_arc, from_function, segment
from .errors import InputError
from .euler import PlanarAction, generator_names
from .planemap import (
    ALL,
    NONNEGATIVE,
    AnnulusTwist,
    Compose,
    Dilation,
    Identity,
    Rotation,
    StripShear,
    Translation,
    lazy_twist_product,
    make_step_translation,
)


def bestvina(n: int = 1, radii=(0.9, 1.1), factor: float = 2.0) -> PlanarAction:
    """Twists in the annuli factor^k * radii for every integer k, against the dilation.

    C-infinity away from the origin, where the twists accumulate.
    """
    r_in, r_out = radii
    tau = AnnulusTwist((0.0, 0.0), r_in, r_out, int(n))
    beta = Dilation(factor)
    alpha = lazy_twist_product(tau, beta, ALL)
    ctx = LiftContext("puncture", (0.0, 0.0), z0=(1.5, 0.3), fixed_by_construction=((0.0, 0.0),))
    return PlanarAction(
        1, {"a1": alpha, "b1": beta}, name="bestvina", nonsmooth=((0.0, 0.0),),
        lift=ctx, graphical_z0=(1.5, 0.3),
        params={"n": int(n), "radii": [r_in, r_out], "factor": factor}, smooth=False)


def genus2_smooth(n: int = 1, R: float = 60.0) -> PlanarAction:
    """Smooth genus-two action: a1 -> alpha, b1 -> beta, a2 -> gamma, b2 -> delta.

    beta doubles and gamma is a step translation by 3 to the right of the
    band [-3, -2].  alpha and delta are one-sided products of conjugates of the twist, so that
    [alpha, beta] and [delta, gamma] both equal the twist.
    """
    tau = AnnulusTwist((0.0, 0.0), 0.9, 1.1, int(n))
    beta = Dilation(2.0)
    gamma = make_step_translation((3.0, 0.0), -3.0, -2.0)
    alpha = lazy_twist_product(tau, beta, NONNEGATIVE)
    delta = lazy_twist_product(tau, gamma, NONNEGATIVE)
    # z0 = (2R, R): beta^-1(z0) keeps clear of the forbidden disk
    ctx = LiftContext("infinity", (0.0, 0.0), R=R, z0=(2 * R, R))
    return PlanarAction(
        2, {"a1": alpha, "b1": beta, "a2": gamma, "b2": delta}, name="genus2_smooth",
        lift=ctx, graphical_z0=(0.5, 0.4), params={"n": int(n), "R": R})


def default_shear_tau() -> SampledCurve:
    return bump_arc((0.0, 0.0), (1.0, 0.0), 0.7)


def torus_shear(amplitude: float = 2.5, band=(0.15, 0.85), tau: SampledCurve | None = None) -> PlanarAction:
    """Horizontal shear of a band (fixing the x-axis) commuting with the unit x-translation."""
    alpha = StripShear(band[0], band[1], amplitude)
    beta = Translation((1.0, 0.0))
    ctx = LiftContext("infinity", (0.0, 0.0), R=10.0, z0=(20.0, 10.0))
    return PlanarAction(
        1, {"a1": alpha, "b1": beta}, name="torus_shear", fixed_point=(0.0, 0.0),
        tau=default_shear_tau() if tau is None else tau, lift=ctx,
        graphical_z0=(0.3, 0.5), params={"amplitude": amplitude, "band": list(band)})


def _dipping_arc(r0: float, depth: float, theta: float) -> SampledCurve:
    """Polar arc from angle 0 to theta at radius r0, dipping to r0 - depth halfway."""
    def f(t):
        r = r0 - depth * np.sin(math.pi * t) ** 2
        a = theta * t
        return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)

    def df(t):
        r = r0 - depth * np.sin(math.pi * t) ** 2
        dr = -depth * math.pi * np.sin(2 * math.pi * t)
        a = theta * t
        e = np.stack([np.cos(a), np.sin(a)], axis=1)
        nrm = np.stack([-np.sin(a), np.cos(a)], axis=1)
        return dr[:, None] * e + (r * theta)[:, None] * nrm
    return from_function(f, df)


def commuting_rotation_twist(theta: float = 1.0, k: int = 1) -> PlanarAction:
    """A twist about the origin and a rotation about the origin: a common fixed point."""
    if not 0 < abs(theta) < math.pi:
        raise InputError("rotation angle must lie in (-pi, pi) and be nonzero")
    alpha = AnnulusTwist((0.0, 0.0), 0.9, 1.1, int(k))
    beta = Rotation(theta)
    ctx = LiftContext("puncture", (0.0, 0.0), z0=(1.5, 0.0))
    return PlanarAction(
        1, {"a1": alpha, "b1": beta}, name="commuting_rotation_twist", fixed_point=(1.5, 0.0),
        tau=_dipping_arc(1.5, 0.5, theta), lift=ctx, graphical_z0=(1.5, 0.2),
        params={"theta": theta, "k": int(k)})


def free_translations(v1=(1.0, 0.0), v2=(0.3, 1.0)) -> PlanarAction:
    v1, v2 = tuple(map(float, v1)), tuple(map(float, v2))
    if abs(v1[0] * v2[1] - v1[1] * v2[0]) < 1e-12:
        raise InputError("translation vectors must be independent")
    R = 10.0 * max(math.hypot(*v1), math.hypot(*v2))
    ctx = LiftContext("infinity", (0.0, 0.0), R=R, z0=(2 * R, R))
    return PlanarAction(
        1, {"a1": Translation(v1), "b1": Translation(v2)}, name="free_translations",
        lift=ctx, graphical_z0=(0.1, 0.2), params={"v1": list(v1), "v2": list(v2)})


def free_segment(action: PlanarAction, p=(0.0, 0.0)) -> SampledCurve:
    """Straight segment from p to a1(p)."""
    p = np.asarray(p, dtype=float)
    return segment(p, action["a1"].apply(p[None])[0])


def torus_twist_chain(seed: int = 0) -> PlanarAction:
    """Seeded C1 torus action: periodic rows of twists against the unit x-translation.

    One row of twists is centered on the orbit points (i, 0) of p = (0, 0),
    a second row sits above them.  tau is a random bump arc from (0, 0) to
    (1, 0), so a1(tau) winds around both of its endpoints.
    """
    rng = np.random.default_rng(seed)
    r2a = rng.uniform(0.15, 0.35)
    r1a = r2a * rng.uniform(0.3, 0.7)
    ka = int(rng.choice([-2, -1, 1, 2]))
    r2b = rng.uniform(0.08, 0.15)
    r1b = r2b * rng.uniform(0.3, 0.7)
    cx = rng.uniform(0.0, 1.0)
    cy = r2a + r2b + rng.uniform(0.05, 0.3)
    kb = int(rng.choice([-2, -1, 1, 2]))
    beta = Translation((1.0, 0.0))
    row_a = lazy_twist_product(AnnulusTwist((0.0, 0.0), r1a, r2a, ka), beta, ALL)
    row_b = lazy_twist_product(AnnulusTwist((cx, cy), r1b, r2b, kb), beta, ALL)
    height = rng.uniform(0.2, 0.8)
    harm = [(j, float(rng.normal(scale=0.15))) for j in (1, 2, 3)]
    tau = bump_arc((0.0, 0.0), (1.0, 0.0), height, harm)
    ctx = LiftContext("infinity", (0.0, 0.0), R=10.0, z0=(20.0, 10.0))
    return PlanarAction(
        1, {"a1": Compose((row_a, row_b)), "b1": beta}, name="torus_twist_chain",
        fixed_point=(0.0, 0.0), tau=tau, lift=ctx, graphical_z0=(0.5, -0.6),
        params={"seed": int(seed), "radii_on_orbit": [r1a, r2a], "k_on_orbit": ka,
                "center_off_orbit": [cx, cy], "radii_off_orbit": [r1b, r2b], "k_off_orbit": kb,
                "tau_height": height, "tau_harmonics": harm})


def pullback_degree_one(base: PlanarAction, g: int) -> PlanarAction:
    """Genus-g action through the degree-one map collapsing handles 2..g."""
    if base.genus != 1:
        raise InputError("pullback needs a genus-one action")
    if g < 2:
        raise InputError("target genus must be at least 2")
    assignment = {name: Identity() for name in generator_names(g)}
    assignment.update({"a1": base["a1"], "b1": base["b1"]})
    return PlanarAction(
        g, assignment, name=f"pullback_{base.name}_g{g}", nonsmooth=base.nonsmooth,
        lift=base.lift, graphical_z0=base.graphical_z0,
        params={"base": base.name, "g": g, **base.params}, smooth=base.smooth)


def trivial() -> PlanarAction:
    return PlanarAction(1, {"a1": Identity(), "b1": Identity()}, name="trivial",
                        lift=LiftContext("puncture", (0.0, 0.0), z0=(1.0, 0.0)),
                        graphical_z0=(0.0, 0.0))


@dataclass(frozen=True)
class ZooRecipe:
    name: str
    build: object
    defaults: dict
    expected: int | None
    summary: str


REGISTRY = {
    r.name: r for r in [
        ZooRecipe("bestvina", bestvina, {"n": 1}, None, "twists accumulating at the origin; Euler number n"),
        ZooRecipe("genus2_smooth", genus2_smooth, {"n": 1}, None, "smooth genus-two action; Euler number n"),
        ZooRecipe("torus_shear", torus_shear, {}, 0, "band shear and x-translation"),
        ZooRecipe("commuting_rotation_twist", commuting_rotation_twist, {"theta": 1.0, "k": 1}, 0,
                  "twist and rotation about a common fixed point"),
        ZooRecipe("free_translations", free_translations, {}, 0, "two independent translations"),
        ZooRecipe("torus_twist_chain", torus_twist_chain, {"seed": 0}, 0,
                  "seeded periodic row of twists and x-translation"),
        ZooRecipe("trivial", trivial, {}, 0, "identity generators"),
    ]
}


def expected_euler(name: str, params: dict) -> int | None:
    if name in ("bestvina", "genus2_smooth"):
        return int(params.get("n", 1))
    rec = REGISTRY.get(name)
    return None if rec is None else rec.expected


def build(name: str, **params) -> PlanarAction:
    if name not in REGISTRY:
        raise InputError(f"unknown recipe {name!r}; known: {sorted(REGISTRY)}")
    rec = REGISTRY[name]
    kw = dict(rec.defaults)
    kw.update(params)
    return rec.build(**kw)
