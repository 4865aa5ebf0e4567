"""Command-line entry point: ``umbrella {analyze,classify,oracle,experiment,figure}``.

Exit codes: 0 success, 2 invalid input, 3 solver inconsistency.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .classify import classify_map
from .errors import InvalidInput, SolverInconsistency
from .experiment import ExperimentConfig, run_genericity_experiment
from .figure import render_figure
from .foliation import DEFAULT_GRID, DEFAULT_TANGENCY_TOL, Box, tangency_search
from .locus import DEFAULT_TOL, singular_curve, solve_singular_points
from .mapping import as_point, mapping_from_dict

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


def _load_map(path: str):
    try:
        if path == "-":
            spec = json.load(sys.stdin)
        else:
            with open(path) as fh:
                spec = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc
    return mapping_from_dict(spec)


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidInput(f"expected x,y, got {text!r}")
    return as_point(parts)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_analyze(args) -> int:
    m = _load_map(args.map)
    if m.ell == 2:
        conic, kind = singular_curve(m)
        _emit({"ell": 2, "conic": conic.to_dict(), "kind": kind})
    else:
        _emit([r.to_dict() for r in solve_singular_points(m, args.tol)])
    return EXIT_OK


def cmd_classify(args) -> int:
    m = _load_map(args.map)
    _emit(classify_map(m, args.tol).to_dict())
    return EXIT_OK


def cmd_oracle(args) -> int:
    m = _load_map(args.map)
    box = Box.parse(args.box) if args.box else None
    _emit(tangency_search(m, box, args.grid, args.tol).to_dict())
    return EXIT_OK


def cmd_experiment(args) -> int:
    kwargs = {}
    if args.box:
        kwargs["box"] = Box.parse(args.box)
    cfg = ExperimentConfig(ell=args.ell, a=args.a, b=args.b, trials=args.trials, seed=args.seed,
                           tol=args.tol, form=args.form, oracle_every=args.oracle_every,
                           keep_trials=args.keep_trials, **kwargs)
    _emit(run_genericity_experiment(cfg).to_dict())
    return EXIT_OK


def cmd_figure(args) -> int:
    m = _load_map(args.map)
    probe = _pair(args.probe) if args.probe else None
    points = []
    if m.ell >= 3:
        points = [r.location for r in solve_singular_points(m, args.tol)]
    if not points and probe is None:
        raise InvalidInput("the mapping has no singular points; pass --probe x,y to depict level curves")
    try:
        render_figure(m, points, probe, args.out)
    except OSError as exc:
        raise InvalidInput(f"cannot write {args.out}: {exc.strerror}") from exc
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="umbrella",
                                description="Singular points of generalized distance-squared mappings of the plane.")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="locate singular points (JSON list)")
    a.add_argument("--map", required=True, help="mapping JSON file, or - for stdin")
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", help="whitney_umbrella / immersion / unresolved")
    c.add_argument("--map", required=True)
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.set_defaults(func=cmd_classify)

    o = sub.add_parser("oracle", help="grid search for mutually tangent level curves")
    o.add_argument("--map", required=True)
    o.add_argument("--box", help="x0,y0,x1,y1 (default: centers' box inflated 3x)")
    o.add_argument("--grid", type=int, default=DEFAULT_GRID)
    o.add_argument("--tol", type=float, default=DEFAULT_TANGENCY_TOL)
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", help="seeded Monte Carlo over random central points")
    e.add_argument("--ell", type=int, required=True)
    e.add_argument("--a", type=float, default=1.0)
    e.add_argument("--b", type=float, default=2.0)
    e.add_argument("--trials", type=int, required=True)
    e.add_argument("--seed", type=int, required=True)
    e.add_argument("--box", help="sampling box x0,y0,x1,y1 (default -2,-2,2,2)")
    e.add_argument("--form", default="ellipse_circle",
                   choices=("ellipse_circle", "distance_squared", "lorentzian"))
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--oracle-every", type=int, default=0, metavar="K",
                   help="also run the tangency oracle on every K-th trial")
    e.add_argument("--keep-trials", action="store_true", help="include per-trial records")
    e.set_defaults(func=cmd_experiment)

    f = sub.add_parser("figure", help="SVG of level curves through singular points")
    f.add_argument("--map", required=True)
    f.add_argument("--probe", help="x,y point used when there are no singular points")
    f.add_argument("--out", required=True)
    f.add_argument("--tol", type=float, default=DEFAULT_TOL)
    f.set_defaults(func=cmd_figure)
    return p


_COORD_OPTIONS = ("--box", "--probe")


def _glue_coordinates(argv):
    """Turn ``--box -5,-5,5,5`` into ``--box=-5,-5,5,5`` so argparse does not read a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _COORD_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_coordinates(argv))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SolverInconsistency as exc:
        print(f"umbrella: solver inconsistency: {exc}", file=sys.stderr)
        _emit({"error": "solver_inconsistency", "message": str(exc),
               "candidates": [list(c) for c in exc.candidates]})
        return EXIT_SOLVER
    except (InvalidInput, ValueError) as exc:
        print(f"umbrella: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
