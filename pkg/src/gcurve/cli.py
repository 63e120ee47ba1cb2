"""Command-line entry points ``interp`` and ``interp-demo``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import demo
from .errors import CurveError
from .fileio import dump_points
from .pipeline import EXIT_ERROR, JobConfig, run


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interp", description="G^r interpolating curve through ordered points.")
    p.add_argument("--input", required=True, help="point file (.json or .csv)")
    p.add_argument("--format", choices=["json", "csv"], help="input format (default: from the extension)")
    p.add_argument("--smoothness", type=int, default=2, help="target order r (default 2)")
    p.add_argument("--local", default="parabola", choices=["parabola", "arc", "auto", "linear", "convex-chord"])
    p.add_argument("--boundary", default="linear", choices=["linear", "natural", "closed"])
    p.add_argument("--blend", default=None, help="poly:R, trig or smooth (default poly:<smoothness>)")
    p.add_argument("--corner-detect", action="store_true", help="keep sharp corners at degenerate vertices")
    p.add_argument("--corner-eps", type=float, default=0.1)
    p.add_argument("--sphere", default=None, help="'auto' or cx,cy[,cz],R for sphere-preserving gluing")
    p.add_argument("--samples-per-span", type=int, default=64)
    p.add_argument("--output", help="sampled curve (.csv, .svg or .obj)")
    p.add_argument("--output-format", choices=["csv", "svg", "obj"])
    p.add_argument("--report", help="report file (.json, otherwise key=value lines)")
    p.add_argument("--figure", help="PNG figure path (default: beside the report)")
    p.add_argument("--no-figure", action="store_true", help="do not render the figure")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    config = JobConfig(
        input=args.input, format=args.format, smoothness=args.smoothness, local=args.local, boundary=args.boundary,
        blend=args.blend, corner_detect=args.corner_detect, corner_eps=args.corner_eps, sphere=args.sphere,
        samples_per_span=args.samples_per_span, output=args.output, output_format=args.output_format,
        report=args.report, figure=args.figure,
    )
    try:
        code, result = run(config, figure=not args.no_figure)
    except (CurveError, OSError, ValueError) as exc:
        print(f"error ({type(exc).__module__.rsplit('.', 1)[-1]}.{type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not config.report and not config.output:
        sys.stdout.write(result.to_keyvalue())
    else:
        status = "passed" if code == 0 else "failed: " + ", ".join(k for k, v in result.report.checks.items() if not v)
        print(f"verification {status}")
    return code


def _demo_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interp-demo", description="Write a demo point cloud as JSON.")
    p.add_argument("name", choices=list(demo.DEMOS))
    p.add_argument("--n", type=int, help="number of points")
    p.add_argument("--m", type=int, help="points per edge (square-corners)")
    p.add_argument("--radius", type=float)
    p.add_argument("--seed", type=int, help="seed (sphere-random)")
    p.add_argument("--abc", help="frequencies a,b,c (lissajous)")
    p.add_argument("--delta", type=float, help="phase (lissajous)")
    p.add_argument("--output", help="JSON path (default: stdout)")
    return p


def demo_main(argv=None) -> int:
    args = _demo_parser().parse_args(argv)
    params = {k: v for k, v in (("n", args.n), ("m", args.m), ("radius", args.radius), ("seed", args.seed),
                                ("delta", args.delta)) if v is not None}
    if args.abc:
        try:
            params["a"], params["b"], params["c"] = (int(x) for x in args.abc.split(","))
        except ValueError:
            print("error: --abc needs three integers", file=sys.stderr)
            return EXIT_ERROR
    try:
        cloud = demo.gen_demo(args.name, **params)
    except CurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dump_points(cloud) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
