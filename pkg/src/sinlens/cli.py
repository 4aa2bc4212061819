"""Command line front end: `sinlens <subcommand> [flags]`.

Exit status: 0 on success, 2 on invalid input (bad flags or parameters),
1 on an internal inconsistency such as solver/oracle or classifier/solver
disagreement. In the last case a diagnostic JSON goes to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from .basins import DEFAULT_MAX_ITER, render_basins
from .caustic import find_cusps, trace_caustic
from .classifier import classify, sweep
from .core import InvalidParam, LensParams, parse_complex
from .critical import trace_critical
from .oracle import DEFAULT_DENSITY, oracle_find_all
from .solver import DEFAULT_RNG_SEED, find_all
from .verify import quick_checks, run_acceptance, same_roots

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> float:
    v = float(text)
    if not np.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _rect(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4 or not (vals[1] > vals[0] and vals[3] > vals[2]):
        raise argparse.ArgumentTypeError("expected x0,x1,y0,y1 with x0<x1, y0<y1")
    return vals


def _seeds(text: str) -> tuple[int, int]:
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected NXxNY, e.g. 61x121") from None
    if nx < 2 or ny < 2:
        raise argparse.ArgumentTypeError("seed grid needs at least 2x2")
    return nx, ny


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sinlens",
                                 description="Solutions of z - k/sin(conj z) = w in |Re z| < pi/2.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, w=True, alpha=False):
        p.add_argument("--k", type=_positive, required=True, help="mass parameter k > 0")
        if alpha:
            p.add_argument("--alpha", type=_complex, default=0j, help="shear (complex, |alpha| != 1)")
        if w:
            p.add_argument("--w", type=_complex, required=True, help="source position, e.g. 0+0.67i")
        p.add_argument("--out", type=Path, help="output file (stdout when omitted, if textual)")

    p = sub.add_parser("solve", help="all solutions by multi-start Newton")
    common(p, alpha=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seeds", type=_seeds, default=(61, 121), help="seed grid NXxNY")
    p.add_argument("--max-iter", type=_count, default=80)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED, help="RNG seed for Newton jitter")
    p.add_argument("--check-oracle", action="store_true",
                   help="also run the grid oracle; exit 1 if the root sets differ")

    p = sub.add_parser("oracle", help="all solutions by grid scan + simplex descent")
    common(p)
    p.add_argument("--density", type=_count, default=DEFAULT_DENSITY)

    p = sub.add_parser("critical", help="critical curve samples (CSV or SVG)")
    common(p, w=False)
    p.add_argument("--samples", type=_count, default=2048)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")

    p = sub.add_parser("caustic", help="caustic and strip-boundary image (CSV or SVG)")
    common(p, w=False)
    p.add_argument("--samples", type=_count, default=2048)
    p.add_argument("--format", choices=["csv", "svg"], default="svg")
    p.add_argument("--im-limit", type=_positive, default=6.0)
    p.add_argument("--window", type=_rect, help="SVG window x0,x1,y0,y1 in the w-plane")

    p = sub.add_parser("cusps", help="cusp records (JSON)")
    common(p, w=False)

    p = sub.add_parser("classify", help="index-based (m, n) at w, checked against the solver")
    common(p)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED)

    p = sub.add_parser("sweep", help="(m, n) labels on a grid: writes PREFIX.csv and PREFIX.svg")
    common(p, w=False)
    p.add_argument("--window", type=_rect, default=(-2.0, 2.0, -2.0, 2.0))
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--spot-checks", type=int, default=5)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED)

    p = sub.add_parser("basins", help="basins of attraction as a P6 PPM")
    common(p)
    p.add_argument("--viewport", type=_rect, default=(-3.0, 3.0, -3.0, 3.0))
    p.add_argument("--width", type=_count, default=400)
    p.add_argument("--height", type=_count, default=400)
    p.add_argument("--max-iter", type=_count, default=DEFAULT_MAX_ITER)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", choices=["acceptance", "quick"], default="acceptance")
    p.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    return ap


def _write(text: str | bytes, out: Path | None, meta: dict, binary: bool = False):
    if out is None:
        if binary:
            raise UsageError("--out is required for binary output")
        sys.stdout.write(text)
        return
    sio.emit(text, out, meta)


def _inputs(args) -> dict:
    skip = {"command", "out"}
    out = {}
    for key, v in sorted(vars(args).items()):
        if key in skip or v is None:
            continue
        out[key] = list(v) if isinstance(v, tuple) else (str(v) if isinstance(v, Path) else v)
    return out


def _fail(diag: dict) -> int:
    sys.stderr.write(sio.dumps({"error": "inconsistency", **diag}))
    return EXIT_INCONSISTENT


def run(args) -> int:
    cmd = args.command
    meta = sio.provenance(cmd, _inputs(args))

    if cmd == "verify":
        if args.suite == "quick":
            results = quick_checks()
        else:
            results = run_acceptance(only=set(args.only) if args.only else None)
        return EXIT_OK if all(r.passed for r in results) else EXIT_INCONSISTENT

    params = LensParams(args.k, getattr(args, "alpha", 0j))

    if cmd == "solve":
        rep = find_all(params, args.w, seeds=args.seeds, max_iter=args.max_iter, rng_seed=args.seed)
        status = EXIT_OK
        if args.check_oracle:
            if params.sheared:
                raise UsageError("--check-oracle needs alpha = 0")
            oz = [s.z for s in oracle_find_all(params, args.w)]
            rep.oracle_agreement = same_roots([s.z for s in rep.solutions], oz)
            if not rep.oracle_agreement:
                status = _fail({"command": cmd, "solver": [sio._c(s.z) for s in rep.solutions],
                                "oracle": [sio._c(z) for z in oz]})
        if rep.violation:
            status = _fail({"command": cmd, "violation": rep.violation})
        text = sio.dumps(sio.report_to_dict(rep)) if args.format == "json" else sio.solutions_csv(rep)
        _write(text, args.out, meta)
        return status

    if cmd == "oracle":
        sols = oracle_find_all(params, args.w, args.density)
        d = {"k": params.k, "w": sio._c(args.w), "density": args.density,
             "solutions": [sio.solution_to_dict(s) for s in sols], "count": len(sols)}
        _write(sio.dumps(d), args.out, meta)
        return EXIT_OK

    if cmd == "critical":
        curve = trace_critical(params, args.samples)
        text = sio.critical_csv(curve) if args.format == "csv" else sio.critical_svg(curve)
        _write(text, args.out, meta)
        return EXIT_OK

    if cmd == "caustic":
        caustic = trace_caustic(params, args.samples)
        if args.format == "csv":
            text = sio.caustic_csv(caustic)
        else:
            text = sio.caustic_svg(params, caustic, args.window, args.im_limit)
        _write(text, args.out, meta)
        return EXIT_OK

    if cmd == "cusps":
        _write(sio.dumps([sio.cusp_to_dict(c) for c in find_cusps(params)]), args.out, meta)
        return EXIT_OK

    if cmd == "classify":
        rep = classify(params, args.w, rng_seed=args.seed)
        _write(sio.dumps(sio.region_to_dict(rep)), args.out, meta)
        if not rep.on_curve and not rep.consistent:
            return _fail({"command": cmd, "report": sio.region_to_dict(rep)})
        return EXIT_OK

    if cmd == "sweep":
        if args.out is None:
            raise UsageError("sweep needs --out PREFIX")
        if args.resolution < 16:
            raise UsageError("--resolution must be at least 16")
        res = sweep(params, args.window, args.resolution, args.spot_checks, args.seed)
        sio.emit(sio.sweep_csv(res), args.out.with_suffix(".csv"), meta)
        sio.emit(sio.sweep_svg(res, overlay=trace_caustic(params, 512)),
                 args.out.with_suffix(".svg"), meta)
        if not res.spot_checks_ok:
            bad = [{"w": sio._c(s.w), "predicted": s.predicted, "solver": s.solver}
                   for s in res.spot_checks if not s.ok]
            return _fail({"command": cmd, "spot_checks": bad})
        return EXIT_OK

    if cmd == "basins":
        if args.out is None:
            raise UsageError("basins needs --out FILE.ppm")
        img = render_basins(params, args.w, args.viewport, args.width, args.height,
                            args.max_iter, rng_seed=args.seed)
        meta["attractors"] = [sio._c(z) for z in img.attractors]
        meta["resolved_fraction"] = img.resolved_fraction
        sio.emit(sio.ppm_bytes(img), args.out, meta)
        return EXIT_OK

    raise UsageError(f"unknown command {cmd}")  # pragma: no cover


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        return run(args)
    except (InvalidParam, UsageError) as exc:
        sys.stderr.write(f"sinlens {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
