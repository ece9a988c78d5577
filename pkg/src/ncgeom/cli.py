"""Command-line front end.

Every subcommand reads JSON inputs, writes one JSON document to stdout, and
exits 0 on success, 2 on input errors, 3 on witness/failure outcomes, and 4
on budget exhaustion.  Randomized subcommands require an explicit --seed and
embed it in their output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import boundary as bd
from . import convexity as cv
from . import demos
from . import pencil as pc
from . import separate as sp
from . import synth as sy
from . import vanishing as vn
from .evaluate import (MatrixTuple, SingularAtZeroError, eval_poly,
                       ray_membership)
from .ncpoly import NcPolynomial

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_WITNESS = 3
EXIT_BUDGET = 4


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _load_poly(path: str) -> NcPolynomial:
    return NcPolynomial.from_dict(_load_json(path))


def _load_tuple(path: str) -> MatrixTuple:
    return MatrixTuple.from_dict(_load_json(path))


def _load_pairs(path: str) -> list[bd.BoundaryPair]:
    data = _load_json(path)
    if not isinstance(data, list):
        raise ValueError("expected a JSON list of boundary pairs")
    return [bd.BoundaryPair.from_dict(d) for d in data]


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_eval(args) -> int:
    p = _load_poly(args.poly)
    X = _load_tuple(args.tuple)
    _emit({"result": eval_poly(p, X).tolist()}, args.out)
    return EXIT_OK


def cmd_member(args) -> int:
    p = _load_poly(args.poly)
    X = _load_tuple(args.tuple)
    v = ray_membership(p, X, grid=args.grid, tol_t=args.tol)
    _emit(v.to_dict(), args.out)
    return EXIT_OK


def cmd_boundary(args) -> int:
    p = _load_poly(args.poly)
    D = _load_tuple(args.direction)
    try:
        pair = bd.find_boundary_pair(p, D, t_max=args.t_max)
    except bd.RayNeverExitsError as e:
        _emit({"error": "RayNeverExits", "detail": str(e)}, args.out)
        return EXIT_BUDGET
    _emit(pair.to_dict(), args.out)
    return EXIT_OK


def cmd_vanish(args) -> int:
    pairs = _load_pairs(args.pairs)
    vs = vn.vanishing_space(pairs, args.degree)
    _emit(vs.to_dict(), args.out)
    return EXIT_OK


def cmd_dominate(args) -> int:
    candidate = bd.BoundaryPair.from_dict(_load_json(args.candidate))
    pairs = _load_pairs(args.pairs)
    _emit({"dominating": vn.is_dominating(candidate, pairs, args.degree)},
          args.out)
    return EXIT_OK


def cmd_falsify(args) -> int:
    p = _load_poly(args.poly)
    if args.check == "contraction":
        report = cv.contraction_closure_check(p, args.trials, args.max_level,
                                              args.seed)
    else:
        report = cv.midpoint_falsifier(p, args.level, args.trials, args.seed)
    _emit(report.to_dict(), args.out)
    return EXIT_WITNESS if report.verdict == "ViolationWitness" else EXIT_OK


def cmd_separate(args) -> int:
    p = _load_poly(args.poly)
    Xb = _load_tuple(args.boundary_point)
    try:
        cert = sp.separating_pencil(p, Xb, seed=args.seed,
                                    samples=args.samples,
                                    n_constraints=args.budget)
    except (sp.SeparationFailedError, sp.StateNotFoundError) as e:
        _emit({"error": type(e).__name__, "detail": str(e),
               "seed": args.seed}, args.out)
        return EXIT_BUDGET
    _emit(cert.to_dict(), args.out)
    return EXIT_OK


def cmd_lmi2(args) -> int:
    p = _load_poly(args.poly)
    try:
        L, deco = pc.quadratic_to_lmi(p)
    except pc.NotPSDError as e:
        direction = e.direction
        # replay the unboundedness argument along the certified ray
        probe = _unbounded_probe(p, direction)
        _emit({"error": "NotPSD", "eigenvalue": e.eigenvalue,
               "direction": direction.tolist(),
               "ray_stays_inside": probe}, args.out)
        return EXIT_WITNESS
    _emit({"pencil": L.to_dict(), "schur_identity": True,
           "decomposition": {"ell": deco.ell.tolist(),
                             "Lambda": deco.Lambda.tolist(),
                             "m": deco.m, "us": deco.us.tolist()}}, args.out)
    return EXIT_OK


def _unbounded_probe(p: NcPolynomial, direction: np.ndarray,
                     t_end: float = 1e3, steps: int = 2000) -> bool:
    """True iff p stays positive along the signed certified ray up to t_end."""
    ell_t = sum(float(p.coeff((j,))[0, 0]) * direction[j - 1]
                for j in range(1, p.g + 1))
    sign = 1.0 if ell_t >= 0.0 else -1.0
    for t in np.linspace(0.0, t_end, steps):
        X = MatrixTuple.scalars(sign * t * direction)
        if eval_poly(p, X)[0, 0] <= 0.0:
            return False
    return True


def cmd_synth(args) -> int:
    p = _load_poly(args.poly)
    try:
        L, report = sy.synthesize_lmi(p, args.budget, args.cap, args.seed,
                                      agree_samples=args.samples)
    except sy.IterationCapExceededError as e:
        _emit({"error": "IterationCapExceeded", "detail": str(e),
               "partial_pencil": e.pencil.to_dict(), "report": e.report},
              args.out)
        return EXIT_BUDGET
    except (sp.SeparationFailedError, sp.StateNotFoundError) as e:
        _emit({"error": type(e).__name__, "detail": str(e),
               "seed": args.seed}, args.out)
        return EXIT_BUDGET
    _emit({"pencil": L.to_dict(), "report": report}, args.out)
    return EXIT_OK


def cmd_min_degree(args) -> int:
    p = _load_poly(args.poly)
    _emit(sy.min_degree_witness(p, args.pairs, args.seed), args.out)
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.which == "bandf":
        doc = demos.demo_bandf(grid=args.grid)
    else:
        doc = demos.demo_tvscreen(args.alpha, args.seed, grid=args.grid,
                                  containment_samples=args.samples)
    _emit(doc, args.out)
    return EXIT_OK if doc["ok"] else EXIT_WITNESS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncgeom")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, seeded=False):
        sp_ = sub.add_parser(name)
        sp_.set_defaults(fn=fn)
        sp_.add_argument("--out")
        if seeded:
            sp_.add_argument("--seed", type=int, required=True)
        return sp_

    p = add("eval", cmd_eval)
    p.add_argument("--poly", required=True)
    p.add_argument("--tuple", required=True)

    p = add("member", cmd_member)
    p.add_argument("--poly", required=True)
    p.add_argument("--tuple", required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("boundary", cmd_boundary)
    p.add_argument("--poly", required=True)
    p.add_argument("--direction", required=True)
    p.add_argument("--t-max", type=float, default=1e6)

    p = add("vanish", cmd_vanish)
    p.add_argument("--pairs", required=True)
    p.add_argument("--degree", type=int, required=True)

    p = add("dominate", cmd_dominate)
    p.add_argument("--candidate", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--degree", type=int, required=True)

    p = add("falsify-convexity", cmd_falsify, seeded=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--check", choices=["contraction", "midpoint"],
                   default="contraction")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--max-level", type=int, default=3)
    p.add_argument("--level", type=int, default=2)

    p = add("separate", cmd_separate, seeded=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--boundary-point", required=True)
    p.add_argument("--samples", type=int, default=120)
    p.add_argument("--budget", type=int, default=60)

    p = add("lmi2", cmd_lmi2)
    p.add_argument("--poly", required=True)

    p = add("synth", cmd_synth, seeded=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--budget", type=int, default=30)
    p.add_argument("--cap", type=int, default=10)
    p.add_argument("--samples", type=int, default=100)

    p = add("min-degree-witness", cmd_min_degree, seeded=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--pairs", type=int, default=50)

    p = sub.add_parser("demo")
    demo_sub = p.add_subparsers(dest="which", required=True)
    pb = demo_sub.add_parser("bandf")
    pb.set_defaults(fn=cmd_demo, which="bandf", seed=None)
    pb.add_argument("--grid", type=int, default=201)
    pb.add_argument("--out")
    pt = demo_sub.add_parser("tvscreen")
    pt.set_defaults(fn=cmd_demo, which="tvscreen")
    pt.add_argument("--alpha", type=float, required=True)
    pt.add_argument("--seed", type=int, required=True)
    pt.add_argument("--grid", type=int, default=201)
    pt.add_argument("--samples", type=int, default=300)
    pt.add_argument("--out")

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, json.JSONDecodeError, ValueError, KeyError,
            SingularAtZeroError) as e:
        print(json.dumps({"error": type(e).__name__, "detail": str(e)},
                         indent=2, sort_keys=True))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
