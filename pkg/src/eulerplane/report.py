"""Running a scene and recording the outcome as a versioned report.

The report body is a key-ordered JSON document.  Its SHA-256 is stored next
to it together with the wall-clock timings, which stay outside the hashed
body so that equal scenes give byte-identical bodies.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import euler, planemap, svg, zoo
from .curve import push_forward, signed_intersections
from .errors import IdentityViolated, NonTransverseContact
from .scene import SceneFile, print_scene

REPORT_FORMAT = "euler-plane-report"
REPORT_VERSION = 1

METHOD_ALIASES = {"lift": "lift", "graphical": "graphical", "signed-sum": "signed_sum",
                  "writhe-diff": "writhe_difference", "signed_sum": "signed_sum",
                  "writhe_difference": "writhe_difference", "all": "all"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


@dataclass
class ReportDocument:
    body: dict
    timings: dict = field(default_factory=dict)
    action: object = None
    reports: list = field(default_factory=list)

    @property
    def body_text(self) -> str:
        return canonical_json(self.body)

    @property
    def body_sha256(self) -> str:
        return hashlib.sha256(self.body_text.encode()).hexdigest()

    def to_text(self) -> str:
        return canonical_json({"body": self.body, "body_sha256": self.body_sha256,
                               "timings": self.timings})

    def write(self, path):
        svg.write_atomic(path, self.to_text())

    @property
    def values(self):
        return {r.method: r.value for r in self.reports}


def _method_kwargs(method, params, seed):
    kw = {}
    if method == "signed_sum":
        if "N" in params:
            kw["N"] = int(params["N"])
        if seed is not None:
            kw["seed"] = int(seed)
    return kw


def run(scene: SceneFile, method: str | None = None, seed: int | None = None,
        log=None) -> ReportDocument:
    """Build the scene's action and run the requested method(s).

    ``method`` and ``seed`` override the scene's method block.  With
    ``all`` every applicable method runs and disagreement raises
    IdentityViolated.
    """
    say = log or (lambda msg: None)
    t_start = time.perf_counter()
    params = dict(scene.method)
    name = METHOD_ALIASES[method or params.get("name", "all")]
    seed = params.get("seed") if seed is None else seed
    action = __import__("eulerplane.scene", fromlist=["build_action"]).build_action(scene)
    timings = {}

    t0 = time.perf_counter()
    rel = planemap.relator_check(action, tol=float(params.get("tol", 1e-9)))
    timings["relator_check"] = time.perf_counter() - t0
    say(f"relator check: max displacement {rel.max_displacement:.3g} ({'pass' if rel.passed else 'FAIL'})")
    if not rel.passed:
        raise IdentityViolated(f"relator check failed: displacement {rel.max_displacement:.3g}",
                               lhs=rel.max_displacement, rhs=rel.tol)

    applicable = euler.applicable_methods(action)
    methods = applicable if name == "all" else [name]
    reports = []
    for m in methods:
        t0 = time.perf_counter()
        rep = euler.compute(action, m, **_method_kwargs(m, params, seed))
        timings[m] = time.perf_counter() - t0
        say(f"{m}: {rep.value}  ({timings[m]:.2f} s)")
        reports.append(rep)

    covering = None
    if "n" in params and "signed_sum" in applicable:
        t0 = time.perf_counter()
        ct = euler.covering_trick_check(action, n=int(params["n"]))
        timings["covering_trick"] = time.perf_counter() - t0
        covering = {"n": ct.n, "e": ct.e, "weighted_sum": ct.weighted_sum, "passed": ct.passed,
                    "A_direct": {str(j): v for j, v in ct.A_direct.items()},
                    "A_convolution": {str(j): v for j, v in ct.A_convolution.items()}}
        say(f"covering trick n={ct.n}: {'pass' if ct.passed else 'FAIL'}")

    values = sorted({r.value for r in reports})
    agreement = len(values) <= 1
    expected = zoo.expected_euler(scene.recipe, scene.recipe_params) if scene.recipe else None
    body = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "inputs": {"scene": print_scene(scene), "method": name, "seed": seed},
        "action": {"name": action.name, "genus": action.genus,
                   "params": euler._jsonable(action.params),
                   "applicable_methods": list(applicable)},
        "relator_check": {"passed": bool(rel.passed), "n_samples": int(rel.n_samples),
                          "tol": rel.tol},
        "covering_trick": covering,
        "reports": [r.to_json() for r in reports],
        "values": {r.method: int(r.value) for r in reports},
        "agreement": agreement,
        "expected": expected,
    }
    timings["total"] = time.perf_counter() - t_start
    doc = ReportDocument(body, {k: round(v, 6) for k, v in timings.items()}, action, reports)
    if not agreement:
        raise IdentityViolated(f"methods disagree: {body['values']}", lhs=values[0], rhs=values)
    return doc


def crossing_events(action, tau=None, N: int = 20):
    """CrossingEvent lists of a1(tau) against the orbit arcs b1^i(tau), i != 0, +-1.

    The arcs with |i| = 1 share an endpoint with a1(tau) and are omitted
    from the figure.
    """
    tau = action.tau if tau is None else tau
    at = push_forward(action["a1"], tau)
    events = []
    arc = tau
    for i in range(1, N + 1):
        arc = push_forward(action["b1"], arc)
        if i > 1:
            try:
                events.extend(signed_intersections(at, arc)[1])
            except NonTransverseContact:
                pass
    arc = tau
    for i in range(1, N + 1):
        arc = push_forward(action["b1"].inverse(), arc)
        if i > 1:
            try:
                events.extend(signed_intersections(at, arc)[1])
            except NonTransverseContact:
                pass
    return events


def scene_figure(doc: ReportDocument, orbit_span: int = 2) -> svg.Figure:
    """Default figure for a report: tau, a1(tau), nearby orbit arcs, supports and crossings."""
    action = doc.action
    fig = svg.Figure(title=f"{action.name}")
    if action.genus == 1 and action.tau is not None:
        tau = action.tau
        fig.add_curve(tau, label="tau")
        fig.add_curve(push_forward(action["a1"], tau), label="a1(tau)")
        arc, back = tau, tau
        for i in range(1, orbit_span + 1):
            arc = push_forward(action["b1"], arc)
            back = push_forward(action["b1"].inverse(), back)
            fig.add_curve(arc, color=svg.PALETTE[-1], label=f"b1^{i}(tau)")
            fig.add_curve(back, color=svg.PALETTE[-1], label=f"b1^{-i}(tau)")
        fig.add_crossings(crossing_events(action, N=orbit_span))
    elif action.graphical_z0 is not None:
        arcs = euler.default_base_arcs(action, action.graphical_z0)
        for e in euler.developed_boundary(action, arcs):
            fig.add_curve(e)
    lo, hi = svg._bounds(fig)
    for a in action.assignment.values():
        for ann in svg.supports_in_view(a, lo, hi):
            if ann not in fig.annuli:
                fig.annuli.append(ann)
    return fig


__all__ = ["ReportDocument", "run", "scene_figure", "crossing_events", "canonical_json",
           "METHOD_ALIASES", "REPORT_FORMAT", "REPORT_VERSION"]
