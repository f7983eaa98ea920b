"""Command-line entry point: ``warpqi {synth,project,metrics,render}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage error. Every file
written gets a ``<path>.manifest.json`` next to it recording the command,
seed, input digests and configuration, and nothing time-dependent, so
reruns are byte-identical.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from contextlib import nullcontext
from pathlib import Path

from . import __version__
from .data import (
    RNG_FAMILY,
    generate_square,
    load_distance_matrix,
    load_layout_csv,
    load_points_csv,
    save_layout_csv,
    save_points_csv,
)
from .errors import WarpQIError
from .metrics import DEFAULT_K, evaluate, warping_index
from .projectors import TsneConfig, pca_project, tsne_project
from .render import RenderSpec, render_quality_svg, save_svg


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(output, argv, *, inputs=(), seed=None, config=None, rng=None):
    doc = {
        "tool": "warpqi",
        "version": __version__,
        "command": ["warpqi", *argv],
        "seed": seed,
        "rng": rng,
        "inputs": {str(p): _digest(p) for p in inputs},
        "config": config or {},
        "output": str(output),
        "output_sha256": _digest(output),
    }
    Path(f"{output}.manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def _hd_source(args):
    if args.distances:
        return load_distance_matrix(args.distances), [args.distances]
    return load_points_csv(args.points), [args.points]


def cmd_synth(args, argv):
    if args.n < 3:
        args.parser.error(f"--n must be at least 3, got {args.n}")
    if args.noise < 0:
        args.parser.error("--noise must be non-negative")
    ps = generate_square(args.n, args.noise, args.seed)
    save_points_csv(ps, args.output)
    write_manifest(
        args.output,
        argv,
        seed=args.seed,
        rng=RNG_FAMILY,
        config={"dataset": args.dataset, "n": args.n, "noise": args.noise},
    )


def cmd_project(args, argv):
    ps = load_points_csv(args.input)
    if args.method == "pca":
        layout = pca_project(ps)
        config = {"method": "pca"}
        seed = rng = None
    else:
        cfg = TsneConfig(
            perplexity=args.perplexity,
            iterations=args.iterations,
            learning_rate=args.learning_rate,
            seed=args.seed,
        )
        layout = tsne_project(ps, cfg)
        config = {"method": "tsne", **cfg.to_dict()}
        seed, rng = args.seed, RNG_FAMILY
    save_layout_csv(layout, args.output)
    write_manifest(args.output, argv, inputs=[args.input], seed=seed, rng=rng, config=config)


def format_table(rows):
    """Plain-text table with the Stress / Trust. / Warping Index columns."""
    head = f"{'Method':<16}{'Stress':>10}{'Trust.':>10}{'Warping Index':>16}"
    out = [head, "-" * len(head)]
    for name, rep in rows:
        out.append(f"{name:<16}{rep.stress:>10.4f}{rep.trustworthiness:>10.4f}{rep.warping_index:>16.4f}")
    return "\n".join(out) + "\n"


def cmd_metrics(args, argv):
    dist, inputs = _hd_source(args)
    layout = load_layout_csv(args.layout)
    report = evaluate(dist, layout, k=args.k, strict=args.strict_metric)
    doc = report.to_json(per_triangle=args.per_triangle)
    if args.table:
        sys.stdout.write(format_table([(Path(args.layout).stem, report)]))
    if args.output:
        Path(args.output).write_text(doc)
        write_manifest(
            args.output,
            argv,
            inputs=[*inputs, args.layout],
            config={"k": args.k, "strict_metric": args.strict_metric, "per_triangle": args.per_triangle},
        )
    elif not args.table:
        sys.stdout.write(doc)


def cmd_render(args, argv):
    dist, inputs = _hd_source(args)
    layout = load_layout_csv(args.layout)
    result = warping_index(layout, dist, strict=args.strict_metric)
    spec = RenderSpec(
        width=args.width,
        height=args.height,
        draw_edges=not args.no_edges,
        draw_points=not args.no_points,
        colorbar=not args.no_colorbar,
    )
    save_svg(render_quality_svg(layout, result.triangulation, result.quality, spec), args.output)
    write_manifest(
        args.output,
        argv,
        inputs=[*inputs, args.layout],
        config={
            "width": spec.width,
            "height": spec.height,
            "draw_edges": spec.draw_edges,
            "draw_points": spec.draw_points,
            "colorbar": spec.colorbar,
            "warping_index": result.index,
        },
    )


def _add_hd_inputs(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("-i", "--points", help="high-dimensional points CSV (n rows x d columns)")
    src.add_argument("--distances", help="n x n distance matrix CSV, instead of points")
    p.add_argument("-l", "--layout", required=True, help="2D layout CSV (n rows x 2 columns)")
    p.add_argument(
        "--strict-metric",
        action="store_true",
        help="fail on distance triples that break the triangle inequality",
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="warpqi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"warpqi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic point set")
    p.add_argument("dataset", choices=["square"])
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--noise", type=float, default=0.001, help="thickness of the third axis")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth, parser=p)

    p = sub.add_parser("project", help="project a points CSV to 2D")
    p.add_argument("method", choices=["pca", "tsne"])
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_project, parser=p)

    p = sub.add_parser("metrics", help="Warping Index, stress and trustworthiness as JSON")
    _add_hd_inputs(p)
    p.add_argument("--k", type=int, default=DEFAULT_K, help="trustworthiness neighbourhood size")
    p.add_argument("--per-triangle", action="store_true", help="include the per-triangle quality map")
    p.add_argument("--table", action="store_true", help="print a human-readable table")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_metrics, parser=p)

    p = sub.add_parser("render", help="SVG of the triangulation coloured by triangle quality")
    _add_hd_inputs(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=800)
    p.add_argument("--no-edges", action="store_true")
    p.add_argument("--no-points", action="store_true")
    p.add_argument("--no-colorbar", action="store_true")
    p.set_defaults(func=cmd_render, parser=p)
    return parser


def _thread_limit():
    value = os.environ.get("WARPQI_THREADS")
    if not value:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(1, int(value)))


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            args.func(args, argv)
    except (WarpQIError, OSError, ValueError) as exc:
        print(f"warpqi: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
