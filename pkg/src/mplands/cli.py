"""Command-line surface: generate, build, landscape, statistics, export.

Artifact-producing commands write a manifest.json recording the command,
parameters, input hashes, seed and outputs, so a run can be reproduced
byte-identically (the worker thread count is a performance knob and is
deliberately left out of the manifest).  Exit codes: 0 ok, 1 usage,
2 input data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__, io
from .bifilt import build_function_rips
from .datagen import gen_circles, gen_disc, gen_kde_surface, knn_codensity, trimodal_sample
from .errors import InputError
from .experiments import run_circles_experiment, run_curvature_experiment, run_modes_experiment
from .grid import Region, compute_landscape_grid, load_landscape_grid, save_landscape_grid
from .rectangles import rect_landscape, rect_landscape_grid, rect_rank, wasserstein_pw
from .stats import (
    FunctionalSpec,
    confidence_interval,
    export_features_csv,
    functional_integral,
    mean_landscape,
    permutation_test,
    q_distance,
    two_sample_t,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _region(text: str) -> Region:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected x1min,x1max,x2min,x2max, got {text!r}")
    return Region(*(float(p) for p in parts))


def _qvalue(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, command, params, inputs, outputs, seed=None):
    manifest = {
        "command": command,
        "parameters": params,
        "input_hashes": {p: _sha256(p) for p in inputs},
        "seed": seed,
        "version": __version__,
        "outputs": sorted(outputs),
    }
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _load_complex_from_args(args):
    if args.complex is not None:
        return io.read_complex(args.complex), [args.complex]
    if args.points is None and args.distances is None:
        raise InputError("provide --complex, --points or --distances")
    if args.max_scale is None:
        raise InputError("--max-scale is required when building from point data")
    if args.points is not None:
        pts, vals = io.read_point_cloud(args.points)
        diff = pts[:, None, :] - pts[None, :, :]
        d = np.sqrt((diff ** 2).sum(-1))
        d = np.minimum(d, d.T)
        np.fill_diagonal(d, 0.0)
        inputs = [args.points]
    else:
        d = io.read_distance_matrix(args.distances)
        vals = None
        inputs = [args.distances]
    if args.values is not None:
        vals = io.read_values(args.values)
        inputs.append(args.values)
    if args.codensity_k is not None:
        vals = knn_codensity(d, args.codensity_k)
    if vals is None:
        raise InputError("no vertex values: provide an f column, --values or --codensity-k")
    return build_function_rips(d, vals, args.max_scale, args.max_dim), inputs


def _add_rips_inputs(p, scale_required=False):
    p.add_argument("--points", help="point-cloud CSV (optional f column)")
    p.add_argument("--distances", help="lower-triangular distance matrix file")
    p.add_argument("--values", help="per-vertex values file")
    p.add_argument("--codensity-k", type=int, default=None,
                   help="derive vertex values as k-th nearest neighbour distance")
    p.add_argument("--max-scale", type=float, required=scale_required, default=None)
    p.add_argument("--max-dim", type=int, default=2)


def build_parser() -> _Parser:
    ap = _Parser(prog="mplands", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a sample data set")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("circles")
    g.add_argument("--n", type=int, default=50, help="points per circle")
    g.add_argument("--colouring", choices=("A", "B"), default="A")
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g = gsub.add_parser("disc")
    g.add_argument("--space", choices=("hyperbolic", "euclidean", "elliptic"),
                   required=True)
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g = gsub.add_parser("kde")
    g.add_argument("--data", help="values file (default: built-in trimodal sample)")
    g.add_argument("--sigma-lo", type=float, default=0.4)
    g.add_argument("--sigma-hi", type=float, default=2.0)
    g.add_argument("--n-sigmas", type=int, default=40)
    g.add_argument("--n-xs", type=int, default=80)
    g.add_argument("--out", required=True)

    p = sub.add_parser("rips", help="build a bifiltered complex file")
    _add_rips_inputs(p, scale_required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("landscape", help="landscape grid of a complex")
    p.add_argument("--complex", help="bifiltered complex file")
    _add_rips_inputs(p)
    p.add_argument("--region", type=_region, required=True,
                   metavar="X1MIN,X1MAX,X2MIN,X2MAX")
    p.add_argument("--resolution", type=float, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--weight", type=_pair, default=(1.0, 1.0), metavar="W1,W2")
    p.add_argument("--dim", type=int, default=0, help="homology dimension")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--pgm", action="store_true", help="also write PGM heatmaps")
    p.add_argument("--stem", default="landscape")
    p.add_argument("--out", required=True)

    p = sub.add_parser("distance", help="q-distance between two grids")
    p.add_argument("grid_a")
    p.add_argument("grid_b")
    p.add_argument("--q", type=_qvalue, default=math.inf)

    p = sub.add_parser("mean", help="pointwise mean of grids")
    p.add_argument("grids", nargs="+")
    p.add_argument("--stem", default="mean")
    p.add_argument("--out", required=True)

    p = sub.add_parser("functional", help="integrate a landscape plane over a box")
    p.add_argument("grid")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--box", type=_region, required=True,
                   metavar="X1MIN,X1MAX,X2MIN,X2MAX")

    p = sub.add_parser("ci", help="normal-approximation confidence interval")
    p.add_argument("values")
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("ttest", help="Welch two-sample test p-value")
    p.add_argument("values_a")
    p.add_argument("values_b")

    p = sub.add_parser("permtest", help="permutation test p-value")
    p.add_argument("values_a")
    p.add_argument("values_b")
    p.add_argument("--n-perm", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("vectorize", help="export grids as a feature matrix")
    p.add_argument("grids", nargs="+")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="rectangle-barcode queries")
    osub = p.add_subparsers(dest="query", required=True)
    o = osub.add_parser("landscape")
    o.add_argument("rects")
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--x", type=_pair, required=True, metavar="X1,X2")
    o = osub.add_parser("rank")
    o.add_argument("rects")
    o.add_argument("--a", type=_pair, required=True, metavar="A1,A2")
    o.add_argument("--b", type=_pair, required=True, metavar="B1,B2")
    o = osub.add_parser("wasserstein")
    o.add_argument("rects_a")
    o.add_argument("rects_b")
    o.add_argument("--q", type=float, default=1.0)
    o = osub.add_parser("grid")
    o.add_argument("rects")
    o.add_argument("--region", type=_region, required=True)
    o.add_argument("--resolution", type=float, required=True)
    o.add_argument("--kmax", type=int, required=True)
    o.add_argument("--stem", default="oracle")
    o.add_argument("--out", required=True)

    p = sub.add_parser("experiment", help="end-to-end experiment pipelines")
    p.add_argument("kind", choices=("circles", "modes", "curvature"))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--points", type=int, default=None,
                   help="points per circle / per disc sample")
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--data", help="values file for the modes experiment")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    return ap


def _cmd_gen(args) -> int:
    outputs, inputs, seed = [], [], getattr(args, "seed", None)
    os.makedirs(args.out, exist_ok=True)
    if args.kind == "circles":
        s = gen_circles(args.n, args.colouring, args.noise, args.seed)
        io.write_point_cloud(os.path.join(args.out, "points.csv"), s.points,
                             s.vertex_values)
        outputs = ["points.csv"]
        params = {"kind": "circles", "n": args.n, "colouring": args.colouring,
                  "noise": args.noise}
    elif args.kind == "disc":
        s = gen_disc(args.space, args.n, args.seed)
        io.write_distance_matrix(os.path.join(args.out, "distances.txt"), s.distances)
        outputs = ["distances.txt"]
        params = {"kind": "disc", "space": args.space, "n": args.n}
    else:
        data = io.read_values(args.data) if args.data else trimodal_sample()
        if args.data:
            inputs.append(args.data)
        sigmas = np.linspace(args.sigma_lo, args.sigma_hi, args.n_sigmas)
        pad = 2.0 * args.sigma_hi
        xs = np.linspace(data.min() - pad, data.max() + pad, args.n_xs)
        tris, grades, nv = gen_kde_surface(data, sigmas, xs)
        from .bifilt import build_closure_bicomplex

        cx = build_closure_bicomplex(tris, grades, n_vertices=nv)
        io.write_complex(os.path.join(args.out, "complex.txt"), cx)
        outputs = ["complex.txt"]
        params = {"kind": "kde", "sigma_lo": args.sigma_lo, "sigma_hi": args.sigma_hi,
                  "n_sigmas": args.n_sigmas, "n_xs": args.n_xs}
        seed = None
    _write_manifest(args.out, "gen", params, inputs, outputs, seed=seed)
    return 0


def _cmd_rips(args) -> int:
    args.complex = None
    cx, inputs = _load_complex_from_args(args)
    out_dir = os.path.dirname(args.out) or "."
    io.write_complex(args.out, cx)
    params = {"max_scale": args.max_scale, "max_dim": args.max_dim,
              "codensity_k": args.codensity_k}
    _write_manifest(out_dir, "rips", params, inputs, [os.path.basename(args.out)])
    return 0


def _cmd_landscape(args) -> int:
    cx, inputs = _load_complex_from_args(args)
    g = compute_landscape_grid(cx, args.region, args.resolution, args.kmax,
                               args.weight, hom_dim=args.dim, threads=args.threads)
    files = save_landscape_grid(g, args.out, args.stem, pgm=args.pgm)
    params = {"region": list(args.region.as_tuple()), "resolution": args.resolution,
              "kmax": args.kmax, "weight": list(args.weight), "dim": args.dim,
              "max_scale": getattr(args, "max_scale", None),
              "max_dim": getattr(args, "max_dim", None),
              "codensity_k": getattr(args, "codensity_k", None)}
    _write_manifest(args.out, "landscape", params, inputs, files)
    return 0


def _cmd_experiment(args) -> int:
    if args.kind == "circles":
        report = run_circles_experiment(
            seed=args.seed, n_samples=args.samples,
            n_per_circle=args.points or 50, noise_sigma=args.noise,
            resolution=args.resolution or 0.1, threads=args.threads,
            out_dir=args.out)
        params = {k: report[k] for k in ("n_samples", "n_per_circle", "noise_sigma",
                                         "resolution")}
    elif args.kind == "modes":
        data = io.read_values(args.data) if args.data else None
        report = run_modes_experiment(data=data,
                                      resolution=args.resolution or 0.01,
                                      threads=args.threads, out_dir=args.out)
        params = {"resolution": report["resolution"], "data": args.data}
    else:
        report = run_curvature_experiment(
            seed=args.seed, n_samples=args.samples, n_points=args.points or 100,
            resolution=args.resolution or 0.1, threads=args.threads,
            out_dir=args.out)
        params = {k: report[k] for k in ("n_samples", "n_points", "resolution")}
    outputs = sorted(f for f in os.listdir(args.out) if f != "manifest.json")
    inputs = [args.data] if getattr(args, "data", None) else []
    _write_manifest(args.out, f"experiment {args.kind}", params, inputs, outputs,
                    seed=args.seed)
    print(json.dumps({k: v for k, v in report.items()
                      if k not in ("functional_values",)}, sort_keys=True))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "gen":
            return _cmd_gen(args)
        if args.cmd == "rips":
            return _cmd_rips(args)
        if args.cmd == "landscape":
            return _cmd_landscape(args)
        if args.cmd == "distance":
            a = load_landscape_grid(args.grid_a)
            b = load_landscape_grid(args.grid_b)
            print(format(q_distance(a, b, args.q), ".17g"))
            return 0
        if args.cmd == "mean":
            grids = [load_landscape_grid(p) for p in args.grids]
            files = save_landscape_grid(mean_landscape(grids), args.out, args.stem)
            _write_manifest(args.out, "mean", {"stem": args.stem}, args.grids, files)
            return 0
        if args.cmd == "functional":
            g = load_landscape_grid(args.grid)
            print(format(functional_integral(g, FunctionalSpec(args.k, args.box)),
                         ".17g"))
            return 0
        if args.cmd == "ci":
            lo, hi = confidence_interval(io.read_values(args.values), args.alpha)
            print(f"{format(lo, '.17g')} {format(hi, '.17g')}")
            return 0
        if args.cmd == "ttest":
            p = two_sample_t(io.read_values(args.values_a), io.read_values(args.values_b))
            print(format(p, ".17g"))
            return 0
        if args.cmd == "permtest":
            p = permutation_test(io.read_values(args.values_a),
                                 io.read_values(args.values_b),
                                 args.n_perm, args.seed)
            print(format(p, ".17g"))
            return 0
        if args.cmd == "vectorize":
            grids = [load_landscape_grid(p) for p in args.grids]
            labels = [os.path.splitext(os.path.basename(p))[0] for p in args.grids]
            export_features_csv(args.out, grids, labels=labels)
            out_dir = os.path.dirname(args.out) or "."
            _write_manifest(out_dir, "vectorize", {}, args.grids,
                            [os.path.basename(args.out)])
            return 0
        if args.cmd == "oracle":
            rects = io.read_rects(args.rects if hasattr(args, "rects") else args.rects_a)
            if args.query == "landscape":
                print(format(rect_landscape(rects, args.k, args.x), ".17g"))
            elif args.query == "rank":
                print(rect_rank(rects, args.a, args.b))
            elif args.query == "wasserstein":
                other = io.read_rects(args.rects_b)
                print(format(wasserstein_pw(rects, other, args.q), ".17g"))
            else:
                g = rect_landscape_grid(rects, args.region, args.resolution, args.kmax)
                files = save_landscape_grid(g, args.out, args.stem)
                params = {"region": list(args.region.as_tuple()),
                          "resolution": args.resolution, "kmax": args.kmax}
                _write_manifest(args.out, "oracle grid", params, [args.rects], files)
            return 0
        if args.cmd == "experiment":
            return _cmd_experiment(args)
        raise InputError(f"unknown command {args.cmd}")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
