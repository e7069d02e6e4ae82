"""Command-line surface: JSON in, JSON out, optional SVG side files.

Exit codes: 0 success, 1 input errors (malformed JSON reported with line and
column), 2 solver/certificate failures carrying a diagnostic payload.
Floats serialize with 17 significant digits so identical runs are
byte-identical.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import chessboard as cb
from . import counterexamples as cx
from . import necklace1d as nk
from . import nested as ns
from . import oracle as orc
from . import stairpath as sp
from . import voronoifair as vf
from .busolver import SolverConfig
from .errors import (
    CertificateFailed,
    FaircutError,
    InstanceTooLarge,
    NonConvergence,
    NotAdmissible,
    NoZeroFound,
)
from .measures import load_measures
from .svg import render_svg

DEFAULT_TOL_BY_DIM = {1: 1e-9}
FALLBACK_TOL = 1e-6


@dataclass
class RunConfig:
    """Tolerance/seed defaults: env FAIRCUT_TOL / FAIRCUT_SEED, flags override."""

    tol: float = None
    seed: int = 0
    grid_resolution: int = None
    svg_path: str = None

    @staticmethod
    def from_args(args):
        tol = getattr(args, "tol", None)
        if tol is None:
            env = os.environ.get("FAIRCUT_TOL")
            tol = float(env) if env else None
        seed = getattr(args, "seed", None)
        if seed is None:
            seed = int(os.environ.get("FAIRCUT_SEED", "0"))
        return RunConfig(tol=tol, seed=seed,
                         grid_resolution=getattr(args, "grid", None),
                         svg_path=getattr(args, "svg", None))

    def resolve_tol(self, dim):
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL_BY_DIM.get(dim, FALLBACK_TOL)

    def solver_cfg(self):
        cfg = SolverConfig(seed=self.seed)
        if self.grid_resolution:
            cfg.grid_levels = (self.grid_resolution,
                               self.grid_resolution * 2,
                               self.grid_resolution * 4)
        return cfg


# ---------------------------------------------------------------------------
# Canonical JSON


def _canon(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if v == np.inf:
            return '"inf"'
        if v == -np.inf:
            return '"-inf"'
        if v != v:
            return '"nan"'
        if v == int(v) and abs(v) < 1e15:
            return f"{v:.1f}"
        return f"{v:.17g}"
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        items = ",".join(_canon(v) for v in list(value))
        return f"[{items}]"
    if isinstance(value, dict):
        items = ",".join(
            f"{json.dumps(str(k))}:{_canon(v)}" for k, v in value.items()
        )
        return "{" + items + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(obj):
    return _canon(obj)


def _emit(payload, stream=None):
    (stream or sys.stdout).write(dumps_canonical(payload) + "\n")


# ---------------------------------------------------------------------------
# Subcommand implementations


def _load(path, expect_dim=None, expect_count=None):
    measures, factors = load_measures(path)
    if expect_dim is not None:
        for m in measures:
            if m.dim != expect_dim:
                raise ValueError(f"measure dimension {m.dim}, expected {expect_dim}")
    if expect_count is not None and len(measures) != expect_count:
        raise ValueError(
            f"expected {expect_count} measures, file has {len(measures)}"
        )
    return measures, factors


def _cmd_necklace(args):
    config = RunConfig.from_args(args)
    measures, factors = _load(args.measures, expect_dim=1)
    k = args.thieves
    tol = config.resolve_tol(1)
    if k in (2,) or len(nk.prime_factors(k)) == 1:
        split = nk.split_prime(measures, k, tol=tol, cfg=config.solver_cfg())
    else:
        split = nk.split_composite(measures, k, tol=tol,
                                   cfg=config.solver_cfg())
    _emit({
        "status": "ok",
        "result": {
            "cuts": list(split.cuts),
            "labels": list(split.labels),
            "shares": [list(row) for row in split.shares],
        },
        "residuals": split.residual,
        "normalization": factors,
    })
    return 0


def _cmd_necklace_discrete(args):
    beads = nk.BeadString.from_text(args.beads)
    split = nk.discrete_split(beads, args.thieves)
    _emit({
        "status": "ok",
        "result": {
            "cuts": [int(c) for c in split.cuts],
            "labels": list(split.labels),
        },
        "residuals": 0.0,
    })
    return 0


def _cmd_stairpath(args):
    config = RunConfig.from_args(args)
    measures, factors = _load(args.measures, expect_dim=2)
    tol = config.resolve_tol(2)
    path = sp.halve_with_path(measures, tol=tol, cfg=config.solver_cfg())
    masses = sp.partition_masses(path.partition, measures)
    payload = {
        "status": "ok",
        "result": {
            "turns": path.turns,
            "segments": [
                {
                    "kind": seg.kind,
                    "fixed": seg.fixed,
                    "lo": seg.lo,
                    "hi": seg.hi,
                    "through_infinity": seg.through_infinity,
                }
                for seg in path.segments
            ],
        },
        "residuals": [float(v - 0.5) for v in masses],
        "normalization": factors,
    }
    if config.svg_path:
        with open(config.svg_path, "w") as fh:
            fh.write(render_svg(path, measures))
        payload["svg"] = config.svg_path
    _emit(payload)
    return 0


def _cmd_nested(args):
    config = RunConfig.from_args(args)
    measures, factors = _load(args.measures)
    dim = measures[0].dim
    tol = config.resolve_tol(dim)
    scheme = ns.load_scheme(args.scheme) if args.scheme else None
    k = args.thieves
    t = len(measures)
    if len(nk.prime_factors(k)) == 1:
        if scheme is None:
            raise ValueError("--scheme is required for prime thieves")
        part = ns.solve_nested(measures, scheme, k, tol=tol,
                               cfg=config.solver_cfg())
        shares = ns.partition_shares(part, measures, k)
        result = {
            "offsets": list(part.offsets),
            "labels": list(part.labels),
            "scheme": part.scheme.to_json(),
            "shares": [list(row) for row in shares],
        }
        residual = float(np.max(np.abs(shares - 1.0 / k)))
    else:
        if args.directions:
            with open(args.directions) as fh:
                dirs = [tuple(map(float, v)) for v in json.load(fh)]
        elif scheme is not None:
            raise ValueError("composite thieves take --directions, not --scheme")
        else:
            raise ValueError("--directions is required for composite thieves")
        comp = ns.solve_nested_composite(measures, dirs, k, tol=tol,
                                         cfg=config.solver_cfg())
        result = {
            "labels": list(comp.labels),
            "hyperplanes": comp.n_hyperplanes,
            "shares": [list(row) for row in comp.shares],
        }
        residual = float(np.max(np.abs(comp.shares - 1.0 / k)))
    _emit({
        "status": "ok", "result": result, "residuals": residual,
        "normalization": factors,
    })
    return 0


def _cmd_chessboard(args):
    config = RunConfig.from_args(args)
    measures, factors = _load(args.measures)
    counts = tuple(int(c) for c in args.counts.split(","))
    if args.dirs:
        with open(args.dirs) as fh:
            directions = tuple(tuple(map(float, v)) for v in json.load(fh))
    else:
        dim = measures[0].dim
        directions = tuple(
            tuple(1.0 if a == i % dim else 0.0 for a in range(dim))
            for i in range(len(counts))
        )
    spec = cb.ChessboardSpec(counts, directions)
    tol = config.resolve_tol(measures[0].dim)
    colouring = cb.solve_chessboard(measures, spec, tol=tol,
                                    cfg=config.solver_cfg())
    residuals = cb.colouring_residuals(colouring, measures)
    payload = {
        "status": "ok",
        "result": {
            "directions": [list(v) for v in colouring.directions],
            "offsets": [list(o) for o in colouring.offsets],
            "parity": colouring.parity,
        },
        "residuals": [float(r) for r in residuals],
        "normalization": factors,
    }
    if config.svg_path:
        with open(config.svg_path, "w") as fh:
            fh.write(render_svg(colouring, measures))
        payload["svg"] = config.svg_path
    _emit(payload)
    return 0


def _cmd_voronoi(args):
    config = RunConfig.from_args(args)
    measures, factors = _load(args.measures)
    with open(args.functions) as fh:
        fns = vf.functions_from_json(json.load(fh))
    tol = config.resolve_tol(measures[0].dim)
    result = vf.solve_fair(fns, measures, args.thieves, tol=tol,
                           cfg=config.solver_cfg())
    payload = {
        "status": "ok",
        "result": {
            "weights": list(result.weights),
            "capacities": list(result.capacities),
            "labels": list(result.labels),
            "shares": [list(row) for row in result.shares],
        },
        "residuals": result.residual,
        "normalization": factors,
    }
    if config.svg_path:
        with open(config.svg_path, "w") as fh:
            fh.write(render_svg(result, measures))
        payload["svg"] = config.svg_path
    _emit(payload)
    return 0


def _cmd_refute(args):
    if args.claim == "one-one":
        kwargs = {"step": args.step}
        if args.width:
            kwargs["width"] = args.width
        cert = cx.refute_one_one(**kwargs)
    elif args.claim == "orthant":
        kwargs = {"step": args.step, "d": args.dim}
        if args.radius:
            kwargs["radius"] = args.radius
        cert = cx.refute_orthant(**kwargs)
    else:
        raise ValueError(f"unknown claim {args.claim!r}")
    _emit({"status": "ok", "result": cert.to_json(),
           "residuals": cert.delta})
    return 0


def _cmd_verify(args):
    mode = args.mode
    if mode == "necklace-discrete":
        beads = nk.BeadString.from_text(args.beads)
        split = nk.discrete_split(beads, args.thieves)
        report = orc.oracle_necklace(beads, args.thieves)
        ok = split.n_cuts == report.best_objective
        _emit({
            "status": "ok" if ok else "mismatch",
            "result": {
                "solver_cuts": split.n_cuts,
                "oracle_cuts": report.best_objective,
                "oracle_space": report.space_size,
                "match": ok,
            },
            "residuals": 0.0,
        })
        return 0 if ok else 2
    if mode == "necklace":
        config = RunConfig.from_args(args)
        measures, _ = _load(args.measures, expect_dim=1)
        tol = config.resolve_tol(1)
        split = (nk.split_prime if len(nk.prime_factors(args.thieves)) == 1
                 else nk.split_composite)(measures, args.thieves, tol=tol)
        shares = np.asarray(split.shares)
        _emit({
            "status": "ok",
            "result": {
                "cuts": list(split.cuts),
                "max_share_error": float(np.max(np.abs(shares - 1.0 / args.thieves))),
                "cut_bound": len(measures) * (args.thieves - 1),
                "within_bound": split.n_cuts <= len(measures) * (args.thieves - 1),
            },
            "residuals": split.residual,
        })
        return 0
    if mode == "stairpath":
        return _verify_stairpath(args)
    raise ValueError(f"unknown verify mode {mode!r}")


def _verify_stairpath(args):
    """Cross-check the path solver against an exhaustive grid family.

    Supports t <= 2 (line and quadrant families); the grid oracle's best
    residual must stay within the Lipschitz slack of zero, and the solver
    must reach its own tolerance on the same instance.
    """
    config = RunConfig.from_args(args)
    measures, _ = _load(args.measures, expect_dim=2)
    t = len(measures)
    if t > 2:
        raise ValueError("verify stairpath supports at most 2 measures")
    tol = config.resolve_tol(2)
    path = sp.halve_with_path(measures, tol=tol, cfg=config.solver_cfg())
    masses = sp.partition_masses(path.partition, measures)
    solver_res = float(np.max(np.abs(masses - 0.5)))

    step = 0.01
    los = np.min([m.bounding_box()[0] for m in measures], axis=0)
    his = np.max([m.bounding_box()[1] for m in measures], axis=0)
    xs = orc.grid_1d(los[0] - step, his[0] + step, step)
    ys = orc.grid_1d(los[1] - step, his[1] + step, step)

    def rect_mass(m, lo, hi):
        total = 0.0
        for alo, ahi, w in m.atoms:
            frac = w
            for ax in range(2):
                seg = max(0.0, min(hi[ax], ahi[ax]) - max(lo[ax], alo[ax]))
                frac *= seg / (ahi[ax] - alo[ax])
            total += frac
        return total

    if t == 1:
        def residual(c):
            kind, pos = c
            lo = (-1e9, -1e9)
            hi = (pos, 1e9) if kind == "v" else (1e9, pos)
            return abs(rect_mass(measures[0], lo, hi) - 0.5)

        candidates = [("v", float(x)) for x in xs] + \
            [("h", float(y)) for y in ys]
    else:
        def residual(c):
            a, b, sx, sy = c
            lo = (-1e9 if sx > 0 else a, -1e9 if sy > 0 else b)
            hi = (a if sx > 0 else 1e9, b if sy > 0 else 1e9)
            return max(abs(rect_mass(m, lo, hi) - 0.5) for m in measures)

        candidates = orc.quadrant_candidates(xs, ys)
    report = orc.oracle_grid_equipartition(residual, candidates)
    lipschitz = max(
        m.marginal_density_bound(0) + m.marginal_density_bound(1)
        for m in measures
    )
    slack = float(lipschitz * step)
    consistent = bool(solver_res <= tol
                      and report.best_objective <= solver_res + slack)
    _emit({
        "status": "ok" if consistent else "mismatch",
        "result": {
            "solver_turns": path.turns,
            "solver_residual": solver_res,
            "oracle_best_residual": report.best_objective,
            "oracle_candidates": report.space_size,
            "lipschitz_slack": slack,
            "consistent": consistent,
        },
        "residuals": solver_res,
    })
    return 0 if consistent else 2


def _cmd_render(args):
    measures, _ = _load(args.measures, expect_dim=2)
    with open(args.result) as fh:
        data = json.load(fh)
    result = data.get("result", data)
    if "segments" in result:
        segs = tuple(
            sp.Segment(s["kind"], _from_canon(s["fixed"]),
                       _from_canon(s["lo"]), _from_canon(s["hi"]),
                       bool(s.get("through_infinity")))
            for s in result["segments"]
        )
        obj = sp.StairPath(segs, int(result.get("turns", 0)))
    elif "parity" in result:
        obj = cb.ChessboardColouring(
            tuple(tuple(v) for v in result["directions"]),
            tuple(tuple(o) for o in result["offsets"]),
            int(result["parity"]), dim=2,
        )
    else:
        raise ValueError("result JSON is not renderable")
    svg = render_svg(obj, measures)
    with open(args.out, "w") as fh:
        fh.write(svg)
    _emit({"status": "ok", "result": {"svg": args.out}, "residuals": None})
    return 0


def _from_canon(v):
    if v == "inf":
        return np.inf
    if v == "-inf":
        return -np.inf
    return float(v)


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    p = argparse.ArgumentParser(
        prog="faircut",
        description="Fair mass partitions: necklaces, stair paths, nested "
                    "cuts, chessboards, weighted Voronoi splits.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(s, svg=False):
        s.add_argument("--tol", type=float, default=None)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--grid", type=int, default=None,
                       help="initial search grid resolution")
        if svg:
            s.add_argument("--svg", default=None, help="write an SVG here")

    s = sub.add_parser("necklace", help="continuous k-thief necklace split")
    s.add_argument("--measures", required=True)
    s.add_argument("--thieves", type=int, required=True)
    common(s)
    s.set_defaults(fn=_cmd_necklace)

    s = sub.add_parser("necklace-discrete", help="exact bead-string split")
    s.add_argument("--beads", required=True)
    s.add_argument("--thieves", type=int, required=True)
    s.set_defaults(fn=_cmd_necklace_discrete)

    s = sub.add_parser("stairpath", help="halving stair path, <= t-1 turns")
    s.add_argument("--measures", required=True)
    common(s, svg=True)
    s.set_defaults(fn=_cmd_stairpath)

    s = sub.add_parser("nested", help="nested fixed-direction fair split")
    s.add_argument("--measures", required=True)
    s.add_argument("--scheme", default=None)
    s.add_argument("--directions", default=None,
                   help="JSON list of directions (composite thieves)")
    s.add_argument("--thieves", type=int, required=True)
    common(s)
    s.set_defaults(fn=_cmd_nested)

    s = sub.add_parser("chessboard", help="chessboard colouring halving")
    s.add_argument("--measures", required=True)
    s.add_argument("--counts", required=True, help="e.g. 1,2")
    s.add_argument("--dirs", default=None, help="JSON list of directions")
    common(s, svg=True)
    s.set_defaults(fn=_cmd_chessboard)

    s = sub.add_parser("voronoi", help="generalized Voronoi fair split")
    s.add_argument("--measures", required=True)
    s.add_argument("--functions", required=True)
    s.add_argument("--thieves", type=int, required=True)
    common(s, svg=True)
    s.set_defaults(fn=_cmd_voronoi)

    s = sub.add_parser("refute", help="negative-result certificates")
    s.add_argument("--claim", required=True, choices=["one-one", "orthant"])
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--radius", type=float, default=None)
    s.add_argument("--width", type=float, default=None)
    s.add_argument("--dim", type=int, default=2)
    s.set_defaults(fn=_cmd_refute)

    s = sub.add_parser("verify", help="cross-check a solver against an oracle")
    s.add_argument("--against-oracle", dest="mode", required=True,
                   choices=["necklace-discrete", "necklace", "stairpath"])
    s.add_argument("--beads", default=None)
    s.add_argument("--measures", default=None)
    s.add_argument("--thieves", type=int, default=2)
    common(s)
    s.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("render", help="re-render a result JSON as SVG")
    s.add_argument("--result", required=True)
    s.add_argument("--measures", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=_cmd_render)

    return p


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except json.JSONDecodeError as exc:
        _emit({
            "status": "invalid",
            "message": f"malformed JSON: {exc.msg} at line {exc.lineno} "
                       f"column {exc.colno}",
        })
        return 1
    except (NoZeroFound, CertificateFailed, NonConvergence) as exc:
        payload = {"status": "error", "error": type(exc).__name__,
                   "message": str(exc)}
        best = getattr(exc, "best_residual", None)
        if best is None:
            best = getattr(exc, "residual", None)
        if best is not None:
            payload["best_residual"] = best
        _emit(payload)
        return 2
    except (NotAdmissible, InstanceTooLarge, FaircutError, ValueError,
            OSError) as exc:
        _emit({"status": "invalid", "message": str(exc)})
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
