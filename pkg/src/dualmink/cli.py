"""Command-line front end.

Exit codes
----------
0  success
1  I/O, parse or usage error
2  invalid measure (malformed atoms, or concentrated on a closed hemisphere)
3  solver stopped without converging
4  invalid body
5  measure atoms and body normals do not match
6  random instance generation failed
7  ``check``: residual above tolerance
"""
import argparse
import hashlib
import os
import platform
import sys
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from . import __version__, io, kernels
from .errors import FormatError, InvalidBody, InvalidMeasure, ShapeMismatch
from .geometry import (DiscreteMeasure, Polytope, hausdorff_distance, hemisphere_witness,
                       random_directions, random_polytope)
from .measures import dual_curvature, dual_volume
from .quadrature import build_rule, default_rule
from .solver import SolverConfig, Status, bound_check, residual, solve

EXIT_OK, EXIT_IO, EXIT_MEASURE, EXIT_MAXITER = 0, 1, 2, 3
EXIT_BODY, EXIT_SHAPE, EXIT_GEN, EXIT_CHECK = 4, 5, 6, 7


@dataclass
class RunManifest:
    """Everything needed to replay a run: ``dualmink replay manifest.json``."""

    command: str
    argv: list
    inputs: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    seed: int = None
    timings: dict = field(default_factory=dict)


def _versions():
    import scipy
    return {"dualmink": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "kernel_backend": kernels.BACKEND}


def _digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _say(msg):
    print(msg, file=sys.stderr)


def _report_path(args):
    if args.report:
        return args.report
    if args.out and args.out != "-":
        root, _ = os.path.splitext(args.out)
        return root + ".report.json"
    return None


def cmd_solve(args):
    mu = io.read_measure(args.measure)
    cfg = SolverConfig(q=args.q, tol=args.tol, max_iter=args.max_iter, quad_level=args.quad_level,
                       starts=args.starts, seed=args.seed)
    t0 = time.perf_counter()
    try:
        body, report = solve(mu, cfg)
    except InvalidMeasure as exc:
        _say(f"invalid measure: {exc}")
        return EXIT_MEASURE, {}
    timings = {"solve": time.perf_counter() - t0}
    payload = report.to_dict()
    if cfg.starts > 1:
        bodies = [body] + [solve(mu, cfg, start=j)[0] for j in range(1, cfg.starts)]
        payload["uniqueness_distance"] = max(
            hausdorff_distance(a, b) for a, b in combinations(bodies, 2))
        timings["starts"] = time.perf_counter() - t0 - timings["solve"]
    io.write_body(args.out, body)
    rpath = _report_path(args)
    if rpath:
        io.write_json(rpath, payload)
    _say(f"{report.status.value}: {report.iterations} iterations, residual {report.residual:.3e}, "
         f"bound M {report.bound_M:.6g} ({'ok' if report.bound_satisfied else 'VIOLATED'})")
    code = EXIT_OK if report.status is Status.CONVERGED else EXIT_MAXITER
    return code, timings


def cmd_measure(args):
    P = io.read_body(args.body)
    dc = dual_curvature(P, args.q, default_rule(P, args.quad_level))
    io.write_measure(args.out, dc.to_measure())
    if args.curvature:
        io.write_json(args.curvature, dc.to_dict())
    dropped = int((dc.masses <= 0).sum())
    _say(f"{len(P) - dropped} atoms, total {dc.total:.17g}"
         + (f"; {dropped} inactive facet(s) omitted" if dropped else ""))
    return EXIT_OK, {}


def cmd_check(args):
    mu = io.read_measure(args.measure)
    P = io.read_body(args.body)
    level = args.quad_level
    try:
        res = residual(mu, P, args.q, default_rule(P, level))
    except ShapeMismatch as exc:
        _say(f"shape mismatch: {exc}")
        return EXIT_SHAPE, {}
    dc = dual_curvature(P, args.q, default_rule(P, level))
    ref_level = (level if level is not None else (0 if P.dim == 2 else 2)) + 1
    ref = dual_volume(P, args.q, build_rule(P.dim, ref_level, P,
                                            method="facet" if P.dim == 3 else None))
    M, ok = bound_check(P, mu.total, args.q)
    verdict = res <= args.tol
    print(f"residual: {res:.6e}")
    print(f"bound M: {M:.17g} ({'satisfied' if ok else 'violated'})")
    print(f"total-mass identity gap: {abs(dc.total - ref) / ref:.3e}")
    print(f"normalization gap |Vq - |mu|| / |mu|: {abs(dc.total - mu.total) / mu.total:.3e}")
    print(f"verdict: {'PASS' if verdict else 'FAIL'} (tol {args.tol:g})")
    return (EXIT_OK if verdict else EXIT_CHECK), {}


def _gen_measure(rng, dim, m, symmetric):
    if symmetric:
        half = random_directions(dim, m // 2, rng)
        V = np.vstack([half, -half])
        w = np.tile(rng.uniform(0.5, 1.5, m // 2), 2)
    else:
        V = random_directions(dim, m, rng)
        w = rng.uniform(0.5, 1.5, m)
    mu = DiscreteMeasure(V, w)
    if hemisphere_witness(mu.directions)[0]:
        raise InvalidMeasure("concentrated")
    return mu


def cmd_gen(args):
    if args.m < args.dim + 1:
        _say(f"need m >= dim + 1 = {args.dim + 1}")
        return EXIT_IO, {}
    if args.symmetric and args.m % 2:
        _say("--symmetric needs an even atom count")
        return EXIT_IO, {}
    rng = np.random.default_rng(args.seed)
    for _ in range(1000):
        try:
            if args.kind == "measure":
                io.write_measure(args.out, _gen_measure(rng, args.dim, args.m, args.symmetric))
                return EXIT_OK, {}
            if args.symmetric:
                half = random_directions(args.dim, args.m // 2, rng)
                h = np.exp(0.3 * rng.standard_normal(args.m // 2))
                P = Polytope(np.vstack([half, -half]), np.tile(h, 2))
                if not P.active.all():
                    continue
            else:
                P = random_polytope(args.dim, args.m, rng, max_tries=1)
            io.write_body(args.out, P)
            return EXIT_OK, {}
        except (InvalidMeasure, InvalidBody):
            continue
    _say("no valid instance in 1000 retries")
    return EXIT_GEN, {}


def cmd_replay(args):
    data = io.read_json(args.manifest)
    try:
        argv = list(data["argv"])
    except (KeyError, TypeError):
        raise FormatError("manifest lacks an argv list") from None
    return main(argv), {}


def build_parser():
    p = _Parser(prog="dualmink", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="recover the body whose dual curvature measure is given")
    s.add_argument("measure")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=5000)
    s.add_argument("--quad-level", type=int, default=None)
    s.add_argument("--starts", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-", help="body file (default: stdout)")
    s.add_argument("--report", default=None, help="report file (default: <out>.report.json)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("measure", help="dual curvature measure of a body")
    s.add_argument("body")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--quad-level", type=int, default=None)
    s.add_argument("--out", default="-")
    s.add_argument("--curvature", default=None, help="also write masses/total/rule_error JSON")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("check", help="certify a body against a measure")
    s.add_argument("measure")
    s.add_argument("body")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--quad-level", type=int, default=None)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gen", help="generate a random valid measure or body")
    s.add_argument("--kind", choices=("measure", "body"), required=True)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--symmetric", action="store_true")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_replay)

    for name, sp in sub.choices.items():
        if name != "replay":
            sp.add_argument("--manifest", default=None, help="write a run manifest here")
    return p


def _manifest(args, argv, timings):
    inputs = {}
    for key in ("measure", "body"):
        path = getattr(args, key, None)
        if path and os.path.exists(path):
            inputs[key] = {"path": path, "sha256": _digest(path)}
    config = {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}
    return RunManifest(args.command, list(argv), inputs, config, _versions(),
                       getattr(args, "seed", None), timings)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        code, timings = args.func(args)
    except InvalidMeasure as exc:
        _say(f"invalid measure: {exc}")
        code, timings = EXIT_MEASURE, {}
    except InvalidBody as exc:
        _say(f"invalid body: {exc}")
        code, timings = EXIT_BODY, {}
    except ShapeMismatch as exc:
        _say(f"shape mismatch: {exc}")
        code, timings = EXIT_SHAPE, {}
    except ValueError as exc:
        _say(f"error: {exc}")
        code, timings = EXIT_IO, {}
    except (FormatError, OSError) as exc:
        _say(f"error: {exc}")
        code, timings = EXIT_IO, {}
    timings["total"] = time.perf_counter() - t0
    if getattr(args, "manifest", None):
        m = _manifest(args, argv, timings)
        m_dict = asdict(m)
        m_dict["exit_code"] = code
        io.write_json(args.manifest, m_dict)
    return code


if __name__ == "__main__":
    sys.exit(main())
