"""Command-line front end.

Subcommands: crown | polygon | renorm | barbot | cone | tits | verify | figures.
``verify`` runs the acceptance suite and exits nonzero when any criterion
fails; the other subcommands build fixtures, run experiments and emit
CSV/SVG/JSON data.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import barbot as bb
from . import boundary as bd
from . import cone as cn
from . import einstein as ein
from . import figures as figs
from .linalg import QuadraticSpace
from .verify import Config, load_hexagon, run_verify


def _write_json(data, path=None):
    text = json.dumps(data, sort_keys=True, indent=1)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_poly(text):
    """Descending coefficient list '1,0.3,0.1' -> PolynomialQuartic."""
    parts = [complex(p.strip().replace("i", "j")) for p in text.split(",")]
    return cn.PolynomialQuartic(tuple(parts[::-1]))


def _parse_schedule(text, steps):
    kind, _, arg = text.partition(":")
    if kind != "geometric":
        raise SystemExit(f"unknown schedule kind {kind!r} (expected geometric:RATIO)")
    ratio = float(arg)
    return [(1.0, ratio ** k) for k in range(steps + 1)]


def cmd_crown(args):
    space = QuadraticSpace(args.n)
    crown = ein.standard_crown(space)
    loop = crown.loop(args.samples_per_edge)
    data = ein.loop_to_json(loop)
    _write_json(data, args.out)
    return 0


def cmd_polygon(args):
    space = QuadraticSpace(args.n)
    loop = ein.build_polygon(space, args.vertices, seed=args.seed)
    data = ein.loop_to_json(loop)
    _write_json(data, args.out)
    return 0


def cmd_renorm(args):
    if args.loop == "fixture":
        loop = load_hexagon()
    else:
        loop = ein.load_loop(args.loop)
    space = loop.space
    crown = ein.standard_crown(space)
    schedule = _parse_schedule(args.schedule, args.steps)
    distances = ein.renormalization_experiment(space, loop, crown, schedule)
    _write_json({
        "schedule": [[lam, mu] for lam, mu in schedule],
        "distances": distances,
        "final": distances[-1],
    }, args.out)
    return 0


def cmd_barbot(args):
    space = QuadraticSpace(args.n)
    surf = bb.standard_barbot_surface(space)
    os.makedirs(args.out, exist_ok=True)
    if args.sample:
        nu, nv = (int(x) for x in args.sample.split(":")[1].split("x"))
        path = os.path.join(args.out, "barbot_samples.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u", "v"] + [f"x{i + 1}" for i in range(space.dim)])
            for u in np.linspace(-2.0, 2.0, nu):
                for v in np.linspace(-2.0, 2.0, nv):
                    writer.writerow([repr(float(u)), repr(float(v))]
                                    + [repr(float(c)) for c in surf.point(u, v)])
        print(path)
    if args.geodesic:
        u0, v0, a, b = (float(x) for x in args.geodesic.split(","))
        d = surf.unit_direction((a, b))
        cls = surf.classify_direction(u0, v0, d)
        path = os.path.join(args.out, "barbot_geodesic.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "u", "v"])
            for t in np.linspace(0.0, args.tmax, 121):
                writer.writerow([repr(float(t)), repr(float(u0 + d[0] * t)),
                                 repr(float(v0 + d[1] * t))])
        _write_json({
            "kind": cls.kind.value,
            "index": cls.index,
            "growth_exponent": cls.growth_exponent,
        })
        print(path)
    if args.horoball:
        kind, _, idx = args.horoball.partition(":")
        if kind == "vertex":
            figs.vertex_horoball(surf, args.out, level=args.level)
        else:
            figs.horoball_levels(surf, args.out, levels=(args.level,))
        print(os.path.join(args.out, "vertex_horoball.svg" if kind == "vertex"
                           else "horoball_levels.svg"))
    return 0


def cmd_cone(args):
    poly = _parse_poly(args.poly)
    radii = [float(r) for r in args.perimeter.split(",")] if args.perimeter else []
    grid = None
    if radii:
        half = max(2.0, 1.5 * max(abs(cn.plane_point(poly.degree, r, 0.0)) for r in radii))
        grid = cn.MetricGrid(poly, 0.0j, half, args.resolution)
    data = cn.report(poly, 0.0j, radii, grid)
    os.makedirs(args.out, exist_ok=True)
    _write_json(data, os.path.join(args.out, "cone_report.json"))
    if args.emit == "csv" and radii:
        path = os.path.join(args.out, "cone_perimeters.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["radius", "perimeter_over_r"])
            for row in data["perimeter_table"]:
                writer.writerow([repr(row["radius"]), repr(row["perimeter_over_r"])])
    print(os.path.join(args.out, "cone_report.json"))
    return 0


def cmd_tits(args):
    rng = np.random.default_rng(args.seed)
    if args.surface == "barbot":
        surface = bb.standard_barbot_surface(QuadraticSpace(args.n))
        curvature = 0.0
    else:
        poly = _parse_poly(args.poly) if args.poly else cn.PolynomialQuartic((0.0, 0.0, 1.0))
        surface = bd.MonomialCone(poly.degree)
        curvature = cn.total_curvature(poly)
    pairs = bd.tits_sample_pairs(surface, args.pairs, rng)
    perimeter = bd.tits_perimeter(surface)
    data = {
        "pairs": pairs,
        "perimeter": perimeter,
        "total_curvature": curvature,
        "identity_residual": abs(curvature - (2.0 * np.pi - perimeter)),
    }
    _write_json(data, args.out)
    return 0


def cmd_verify(args, extra_tols):
    cfg = Config()
    if args.config:
        for line in open(args.config):
            line = line.split("#")[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key.startswith("tol."):
                cfg.tolerances[key[4:]] = float(value)
            elif key in ("n", "seed", "resolution", "workers"):
                setattr(cfg, key, int(value))
            elif key == "out_dir":
                cfg.out_dir = value
    for key, value in (("n", args.n), ("seed", args.seed),
                       ("resolution", args.resolution), ("workers", args.workers)):
        if value is not None:
            setattr(cfg, key, value)
    if args.out is not None:
        cfg.out_dir = args.out
    cfg.tolerances.update(extra_tols)
    code, summary = run_verify(cfg)
    _write_json(summary, os.path.join(cfg.out_dir, "summary.json"))
    print(f"summary: {os.path.join(cfg.out_dir, 'summary.json')}")
    return code


def cmd_figures(args):
    surf = bb.standard_barbot_surface(QuadraticSpace(args.n))
    files = figs.emit_figures(surf, args.out)
    for f in files:
        print(f)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pseudohyp")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crown", help="emit the standard crown as loop JSON")
    p.add_argument("--standard", action="store_true", default=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--samples-per-edge", type=int, default=64)
    p.add_argument("--out")

    p = sub.add_parser("polygon", help="build a validated lightlike polygon")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out")

    p = sub.add_parser("renorm", help="Cartan renormalization experiment")
    p.add_argument("--loop", required=True, help="loop JSON file, or 'fixture'")
    p.add_argument("--schedule", default="geometric:0.5")
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--out")

    p = sub.add_parser("barbot", help="sample the standard flat surface")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--sample", help="grid:NUxNV")
    p.add_argument("--geodesic", help="u0,v0,a,b")
    p.add_argument("--tmax", type=float, default=30.0)
    p.add_argument("--horoball", help="vertex:I or edge:I")
    p.add_argument("--level", type=float, default=0.5)
    p.add_argument("--emit", default="csv")
    p.add_argument("--out", default="out")

    p = sub.add_parser("cone", help="cone metric report for a polynomial")
    p.add_argument("--poly", required=True, help="descending coefficients a,b,c")
    p.add_argument("--perimeter", help="comma list of radii")
    p.add_argument("--resolution", type=int, default=801)
    p.add_argument("--emit", default="json")
    p.add_argument("--out", default="out")

    p = sub.add_parser("tits", help="ideal boundary distance report")
    p.add_argument("--surface", choices=("barbot", "cone"), required=True)
    p.add_argument("--poly")
    p.add_argument("--pairs", type=int, default=5)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--config")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")

    p = sub.add_parser("figures", help="emit the chart figures (SVG + CSV)")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--out", default="out/figures")
    return parser


def _extract_tol_overrides(argv):
    """Pull --tol.NAME=V (or --tol.NAME V) pairs out of the raw arguments."""
    rest, tols = [], {}
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg.startswith("--tol."):
            key, eq, value = arg[6:].partition("=")
            if not eq:
                i += 1
                if i >= len(argv):
                    raise SystemExit(f"missing value for --tol.{key}")
                value = argv[i]
            tols[key] = float(value)
        else:
            rest.append(arg)
        i += 1
    return rest, tols


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    argv, tols = _extract_tol_overrides(argv)
    args = build_parser().parse_args(argv)
    handlers = {
        "crown": cmd_crown,
        "polygon": cmd_polygon,
        "renorm": cmd_renorm,
        "barbot": cmd_barbot,
        "cone": cmd_cone,
        "tits": cmd_tits,
        "figures": cmd_figures,
    }
    if args.command == "verify":
        return cmd_verify(args, tols)
    if tols:
        raise SystemExit("--tol.* overrides apply to the verify subcommand")
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
