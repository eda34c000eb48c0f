"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 usage error, 3 resource guard.
Machine-readable output goes to stdout or ``--out``; diagnostics go to stderr.
The environment variable ``JITTERSTAR_SEED`` sets the default seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, discrepancy, io
from .errors import DomainError, ResourceGuardError
from .experiment import RunConfig, run_experiment
from .geometry import AnchoredBox, GridPartition
from .samplers import RandomStream, jittered, simple_random

SEED_ENV = "JITTERSTAR_SEED"

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def cmd_generate(args):
    seed = args.seed if args.seed is not None else _default_seed()
    stream = RandomStream(seed, args.stream)
    if args.sampler == "jittered":
        if args.m is None:
            raise DomainError("jittered sampling needs --m")
        pts = jittered(GridPartition(args.d, args.m), stream)
    else:
        n = args.n if args.n is not None else (args.m ** args.d if args.m is not None else None)
        if n is None:
            raise DomainError("simple sampling needs --n or --m")
        pts = simple_random(n, args.d, stream)
    io.write_points_csv(pts, args.out)


def cmd_discrepancy(args):
    pts = io.read_points_csv(args.points)
    if args.method == "cover" and args.delta is None:
        raise DomainError("--method cover needs --delta")
    result = discrepancy.star_discrepancy(pts, method=args.method, delta=args.delta, max_work=args.max_work)
    out = result.to_dict()
    out.update(N=pts.N, d=pts.d)
    io.write_json(out, args.out)


def cmd_cover(args):
    out = discrepancy.cover_size_report(args.d, args.delta)
    if args.points is not None:
        pts = io.read_points_csv(args.points)
        cover = discrepancy.build_delta_cover(args.d, args.delta)
        out["discrepancy"] = discrepancy.cover_discrepancy_result(pts, cover, max_work=args.max_work).to_dict()
    io.write_json(out, args.out)


def cmd_variance(args):
    partition = GridPartition(args.d, args.m)
    box = AnchoredBox(args.x)
    if box.d != partition.d:
        raise DomainError(f"--x has {box.d} coordinates, expected {partition.d}")
    out = analysis.variance_comparison(partition, box).to_dict()
    out.update(d=args.d, m=args.m, N=partition.N, x=list(box.corner), box_volume=box.volume)
    io.write_json(out, args.out)


def cmd_bounds(args):
    out = analysis.bounds_report(args.d, args.N, args.q, args.sigma0)
    if args.lam is not None:
        sigma_sq = args.sigma_sq if args.sigma_sq is not None else args.sigma0 ** 2
        out["lambda"] = args.lam
        out["sigma_sq_sum"] = sigma_sq
        out["bernstein"] = analysis.bernstein_tail_bound(sigma_sq, args.C, args.lam)
        out["union"] = analysis.union_tail_bound(args.d, args.N, sigma_sq, args.lam)
        out["log_union"] = analysis.log_union_tail_bound(args.d, args.N, sigma_sq, args.lam)
    io.write_json(out, args.out)


def cmd_experiment(args):
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError("config must be a JSON object")
    data.setdefault("master_seed", _default_seed())
    config = RunConfig.from_dict(data)
    result = run_experiment(config, threads=args.threads)
    io.write_experiment_csv(result, args.out)
    summary = result.summary()
    if args.summary is not None:
        io.write_json(summary, args.summary)
    print(f"verdict: {summary['verdict']}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jitterstar", description="Star discrepancy of jittered vs simple random sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random point set as CSV")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, help="cells per axis (jittered) or N = m^d (simple)")
    p.add_argument("--n", type=int, help="number of points for simple sampling")
    p.add_argument("--sampler", choices=["simple", "jittered"], default="jittered")
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int, default=0, help="stream id under the seed")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discrepancy", help="star discrepancy of a CSV point set")
    p.add_argument("--points", required=True)
    p.add_argument("--method", choices=["exact", "cover"], default="exact")
    p.add_argument("--delta", type=float)
    p.add_argument("--max-work", type=int, default=discrepancy.DEFAULT_MAX_WORK)
    p.add_argument("--out")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("cover", help="grid delta-cover size and optional cover discrepancy")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--points")
    p.add_argument("--max-work", type=int, default=discrepancy.DEFAULT_MAX_WORK)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("variance", help="stratified vs simple count variance for a box")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", type=_floats, required=True, help="box corner, comma separated")
    p.add_argument("--out")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("bounds", help="evaluate A, high-probability bound, C0/C1 and tail bounds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--sigma0", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--sigma-sq", type=float, help="Sigma^2 for the tail bounds (default sigma0^2)")
    p.add_argument("--C", type=float, default=1.0, help="summand bound for the Bernstein evaluator")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="replicated sampler comparison from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV of per-replication discrepancies")
    p.add_argument("--summary", help="JSON summary path")
    p.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        args.func(args)
    except ResourceGuardError as exc:
        print(f"jitterstar: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DomainError, OSError) as exc:
        print(f"jitterstar: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
