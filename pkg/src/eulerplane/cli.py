"""Command line: ``euler-plane run``, ``euler-plane zoo list``, ``euler-plane check``.

Exit codes: 0 success, 2 input or parse error, 3 numerical failure,
4 identity violation.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import checks, report, svg, zoo
from .errors import IdentityViolated, InputError, NumericalError, SceneError
from .scene import parse_scene

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IDENTITY = 0, 2, 3, 4

HINTS = {
    "TailNotVanished": "increase N in the [method] block",
    "ResidueTooLarge": "the curves are too coarse or degenerate; try another seed",
    "NonTransverseContact": "try another --seed",
    "OrbitMaybeNonProper": "use method lift or graphical",
}


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="euler-plane",
                                description="Euler numbers of surface-group actions on the plane")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scene file")
    r.add_argument("scene")
    r.add_argument("--report", metavar="PATH")
    r.add_argument("--svg", metavar="PATH")
    r.add_argument("--seed", type=_u64, metavar="U64")
    r.add_argument("--method", choices=["lift", "graphical", "signed-sum", "writhe-diff", "all"])
    r.add_argument("--verbose", action="store_true")
    z = sub.add_parser("zoo", help="named constructions")
    z.add_argument("action", choices=["list"])
    sub.add_parser("check", help="run the built-in property suite")
    return p


def _error(exc, verbose):
    name = type(exc).__name__
    msg = f"error: {name}: {exc}"
    if name in HINTS:
        msg += f" (hint: {HINTS[name]})"
    print(msg, file=sys.stderr)
    if verbose and isinstance(exc, IdentityViolated):
        print(f"  lhs = {exc.lhs!r}\n  rhs = {exc.rhs!r}", file=sys.stderr)


def _under(base, path):
    return None if path is None else os.path.join(base, path)


def cmd_run(args) -> int:
    try:
        with open(args.scene, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.scene}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    try:
        scene = parse_scene(text)
    except SceneError as exc:
        print(f"{args.scene}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        doc = report.run(scene, method=args.method, seed=args.seed, log=log)
    except IdentityViolated as exc:
        _error(exc, args.verbose)
        return EXIT_IDENTITY
    except NumericalError as exc:
        _error(exc, args.verbose)
        return EXIT_NUMERICAL
    except InputError as exc:
        _error(exc, args.verbose)
        return EXIT_INPUT
    for r in doc.reports:
        print(f"{r.method}: {r.value}")
    if len(doc.reports) > 1:
        print(f"agreement: {str(doc.body['agreement']).lower()}")
    # paths from the scene's [output] block are relative to the scene file
    here = os.path.dirname(os.path.abspath(args.scene))
    report_path = args.report or _under(here, scene.output.get("report"))
    svg_path = args.svg or _under(here, scene.output.get("svg"))
    try:
        if report_path:
            doc.write(report_path)
        if svg_path:
            svg.emit_svg(report.scene_figure(doc), svg_path)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_zoo(args) -> int:
    width = max(len(n) for n in zoo.REGISTRY)
    for name, rec in sorted(zoo.REGISTRY.items()):
        defaults = " ".join(f"{k}={v}" for k, v in rec.defaults.items())
        exp = "n" if rec.expected is None else str(rec.expected)
        print(f"{name:<{width}}  e={exp:<2} {rec.summary}" + (f"  [{defaults}]" if defaults else ""))
    return EXIT_OK


def cmd_check(args) -> int:
    results = checks.run_all(emit=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {total:.1f} s")
    return EXIT_OK if not failed else EXIT_IDENTITY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return {"run": cmd_run, "zoo": cmd_zoo, "check": cmd_check}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
