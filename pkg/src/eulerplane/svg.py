"""Deterministic SVG figures: oriented curves, shaded supports, crossings, X_n graphs.

Output depends only on the inputs: coordinates are printed with a fixed
number of decimals and elements appear in the order given.
"""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .planemap import (
    AnnulusTwist,
    Compose,
    ConjProduct,
    Dilation,
    DiskRotation,
    Inverse,
    Power,
    StepTranslation,
    Translation,
)

PALETTE = ("#1f4e79", "#b5462f", "#3c7d3a", "#7a4f9a", "#a07b12", "#2f7f86", "#555555")


@dataclass
class Figure:
    curves: list = field(default_factory=list)      # (points (N,2), color, label)
    annuli: list = field(default_factory=list)      # (center, r_in, r_out)
    crossings: list = field(default_factory=list)   # (point, sign)
    polylines: list = field(default_factory=list)   # (points, color, label) without arrows
    title: str = ""

    def add_curve(self, c, color=None, label=""):
        color = PALETTE[len(self.curves) % len(PALETTE)] if color is None else color
        pts = c.points if hasattr(c, "points") else np.asarray(c, dtype=float)
        self.curves.append((np.asarray(pts, dtype=float), color, label))

    def add_crossings(self, events):
        for e in events:
            self.crossings.append((np.asarray(e.point, dtype=float), int(e.sign)))


def _f(x):
    return f"{x:.4f}".rstrip("0").rstrip(".") if x == x else "0"


def _thin(pts, max_points=2000):
    if len(pts) <= max_points:
        return pts
    idx = np.unique(np.linspace(0, len(pts) - 1, max_points).astype(int))
    return pts[idx]


def _bounds(fig: Figure):
    chunks = [p for p, _, _ in fig.curves] + [p for p, _, _ in fig.polylines]
    chunks += [np.array([c - r_out, c + r_out]) for c, _, r_out in
               ((np.asarray(c, dtype=float), a, b) for c, a, b in fig.annuli)]
    chunks += [np.atleast_2d(p) for p, _ in fig.crossings]
    if not chunks:
        return np.array([0.0, 0.0]), np.array([1.0, 1.0])
    allp = np.concatenate([np.atleast_2d(c) for c in chunks])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.05 * max(float(np.max(hi - lo)), 1e-6)
    return lo - pad, hi + pad


def render(fig: Figure, width: int = 640) -> str:
    lo, hi = _bounds(fig)
    span = hi - lo
    scale = width / max(float(span[0]), 1e-12)
    height = max(int(round(float(span[1]) * scale)), 1)
    if height > 4 * width:
        scale = 4 * width / float(span[1])
        height = 4 * width

    def tx(p):
        p = np.atleast_2d(p)
        return np.stack([(p[:, 0] - lo[0]) * scale, (hi[1] - p[:, 1]) * scale], axis=1)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(width)}" height="{height}" '
           f'viewBox="0 0 {int(width)} {height}">']
    out.append('<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" '
               'markerHeight="7" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" '
               'fill="context-stroke"/></marker></defs>')
    if fig.title:
        out.append(f'<title>{fig.title}</title>')
    for c, r_in, r_out in fig.annuli:
        cc = tx(np.asarray(c, dtype=float))[0]
        ro, ri = r_out * scale, r_in * scale
        out.append(f'<path class="support" fill="#c8c8c8" fill-opacity="0.5" fill-rule="evenodd" d="'
                   f'M{_f(cc[0] + ro)},{_f(cc[1])} A{_f(ro)},{_f(ro)} 0 1 0 {_f(cc[0] - ro)},{_f(cc[1])} '
                   f'A{_f(ro)},{_f(ro)} 0 1 0 {_f(cc[0] + ro)},{_f(cc[1])} Z '
                   f'M{_f(cc[0] + ri)},{_f(cc[1])} A{_f(ri)},{_f(ri)} 0 1 0 {_f(cc[0] - ri)},{_f(cc[1])} '
                   f'A{_f(ri)},{_f(ri)} 0 1 0 {_f(cc[0] + ri)},{_f(cc[1])} Z"/>')
    for pts, color, label in fig.curves:
        q = tx(_thin(pts))
        d = " ".join(f"{_f(x)},{_f(y)}" for x, y in q)
        title = f"<title>{label}</title>" if label else ""
        out.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.5" '
                   f'marker-end="url(#arrow)" points="{d}">{title}</polyline>')
    for pts, color, label in fig.polylines:
        q = tx(pts)
        d = " ".join(f"{_f(x)},{_f(y)}" for x, y in q)
        title = f"<title>{label}</title>" if label else ""
        out.append(f'<polyline class="graph" fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{d}">{title}</polyline>')
    for p, sign in fig.crossings:
        q = tx(p)[0]
        color = "#b00020" if sign > 0 else "#0040b0"
        out.append(f'<g class="crossing" data-sign="{sign:+d}"><circle cx="{_f(q[0])}" cy="{_f(q[1])}" '
                   f'r="3" fill="{color}"/><text x="{_f(q[0] + 4)}" y="{_f(q[1] - 4)}" '
                   f'font-size="10" fill="{color}">{"+" if sign > 0 else "-"}</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_atomic(path, text: str):
    """Write text to path through a temporary file and a rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_svg(fig: Figure, path) -> str:
    text = render(fig)
    write_atomic(path, text)
    return text


def xn_figure(n: int, span: int | None = None) -> Figure:
    """Graph of the clamped weight X_n on integers in [-span, span]."""
    from .euler import covering_weight
    span = 3 * (2 * n + 1) if span is None else span
    i = np.arange(-span, span + 1)
    pts = np.stack([i.astype(float), [float(covering_weight(n, int(k))) for k in i]], axis=1)
    fig = Figure(title=f"X_{n}")
    fig.polylines.append((pts, PALETTE[0], f"X_{n}"))
    return fig


def supports_in_view(expr, lo, hi, max_items: int = 200):
    """Annular supports of twist-like pieces of expr meeting the box [lo, hi]."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    found = []

    def visit(e, conj_scale=1.0, conj_map=None):
        if len(found) >= max_items:
            return
        if isinstance(e, (AnnulusTwist, DiskRotation)):
            c = np.asarray(e.center, dtype=float)
            if conj_map is not None:
                c = conj_map(c)
            r_in, r_out = e.r_in * conj_scale, e.r_out * conj_scale
            if np.all(c + r_out >= lo) and np.all(c - r_out <= hi) and r_out * 200 > np.max(hi - lo):
                found.append((tuple(np.round(c, 12)), r_in, r_out))
        elif isinstance(e, Compose):
            for p in e.parts:
                visit(p, conj_scale, conj_map)
        elif isinstance(e, (Inverse, Power)):
            visit(e.child, conj_scale, conj_map)
        elif isinstance(e, ConjProduct):
            g = e.conjugator
            rng = range(0 if e.indices == "nonnegative" else -40, 41)
            for n in rng:
                if isinstance(g, Dilation):
                    lam = g.factor ** n
                    cen = np.asarray(g.center, dtype=float)
                    visit(e.core, conj_scale * lam,
                          lambda p, lam=lam, cen=cen: cen + lam * (p - cen))
                elif isinstance(g, (Translation, StepTranslation)):
                    v = np.asarray(g.vector if isinstance(g, Translation) else g.shift, dtype=float) * n
                    visit(e.core, conj_scale, lambda p, v=v: p + v)
    visit(expr)
    return found
