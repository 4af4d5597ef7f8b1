"""Command-line surface: reproducible experiments and the acceptance suite.

Reports are JSON lines (one object per check, canonical key order) on
stdout or --out FILE.  Exit codes: 0 success, 1 at least one check
failed, 2 usage error.  SMCENSUS_THREADS sets the verify worker count;
it affects speed only, never results.
"""

from __future__ import annotations

import argparse
import json
import sys
from math import comb

from . import bounds, distributions, matchings, posets, rotations
from .distributions import EXTENDED, PLAIN
from .instances import parse_instance, random_instance, serialize_instance
from .verify import RunConfig, run_verify_suite

SERIES_VARIANTS = {"tg": PLAIN, "sm": EXTENDED}
SERIES_LIMITS = {"tg": bounds.PLAIN_LOG_LIMIT, "sm": bounds.EXTENDED_LOG_LIMIT}


def _emit(stream, obj) -> None:
    stream.write(json.dumps(obj, sort_keys=True, default=str) + "\n")


def _load_profile(args):
    if args.infile:
        with open(args.infile, "r", encoding="utf-8") as fh:
            return parse_instance(fh.read())
    if args.n is None:
        raise SystemExit(2)
    return random_instance(args.n, args.seed)


def _cmd_enumerate(args, out) -> int:
    profile = _load_profile(args)
    counts = {}
    if args.method in ("brute", "both"):
        counts["brute"] = len(matchings.enumerate_stable_bruteforce(profile))
    if args.method in ("rotations", "both"):
        counts["rotations"] = len(rotations.enumerate_stable_via_rotations(profile))
        rposet = rotations.build_rotation_poset(profile)
        counts["downsets"] = posets.count_downsets(rotations.to_finite_poset(rposet))
    agree = len(set(counts.values())) <= 1
    _emit(out, {"check": "enumerate", "n": profile.n, "counts": counts,
                "passed": agree})
    return 0 if agree else 1


def _cmd_rotations(args, out) -> int:
    profile = _load_profile(args)
    rposet = rotations.build_rotation_poset(profile)
    report = rotations.check_structure(rposet)
    _emit(out, {"check": "rotations", "n": profile.n,
                "poset": rotations.poset_to_json(rposet),
                "structure": report.checks, "passed": report.passed})
    return 0 if report.passed else 1


def _cmd_grids(args, out) -> int:
    if args.diamond:
        grid = posets.grid_diamond(args.diamond)
        expected = comb(2 * args.diamond, args.diamond)
    else:
        profile = _load_profile(args)
        grid = posets.embed_in_tangled_grid(rotations.build_rotation_poset(profile))
        expected = None
    downsets = posets.count_downsets(grid.poset, cap=64)
    ok = expected is None or downsets == expected
    _emit(out, {"check": "grids", "grid": posets.grid_to_json(grid),
                "downsets": downsets, "expected": expected, "passed": ok})
    return 0 if ok else 1


def _cmd_series(args, out) -> int:
    variant = SERIES_VARIANTS[args.which]
    interval = bounds.gap_log_series(args.truncate, variant)
    limit = SERIES_LIMITS[args.which]
    ok = interval.hi <= limit
    _emit(out, {"check": f"series_{args.which}", "lo": interval.lo,
                "hi": interval.hi, "truncation": interval.truncation,
                "limit": limit, "passed": ok})
    return 0 if ok else 1


def _cmd_bounds(args, out) -> int:
    if args.series:
        return _cmd_series(argparse.Namespace(which=args.series,
                                              truncate=args.truncate), out)
    report = bounds.bound_report(args.n)
    ok = all(report["checks"].values())
    _emit(out, {"check": "bounds", **report, "passed": ok})
    return 0 if ok else 1


def _cmd_simulate(args, out) -> int:
    if args.kind == "cyclic":
        samples = distributions.sample_cyclic_gap(args.n, args.l, args.seed,
                                                  args.samples)
        pmf = {k: str(p) for k, p in distributions.cyclic_gap_pmf(args.n, args.l).support}
        freq = {k: samples.count(k) / len(samples) for k in sorted(set(samples))}
        _emit(out, {"check": "simulate_cyclic", "n": args.n, "l": args.l,
                    "pmf": pmf, "freq": freq, "passed": True})
        return 0
    if args.kind in ("plain", "extended"):
        sampler = distributions.LineGapSampler(args.x, args.kind, args.seed)
        samples = sampler.take(args.samples)
        freq = {k: samples.count(k) / len(samples) for k in sorted(set(samples))[:12]}
        _emit(out, {"check": f"simulate_{args.kind}", "x": args.x,
                    "window": sampler.window, "freq": freq, "passed": True})
        return 0
    if args.kind == "dependence":
        ok = True
        for pattern in distributions.legal_identification_patterns():
            res = distributions.gap_dependence_check(args.x, pattern, args.seed,
                                                     args.samples)
            ok &= res.passed
            _emit(out, {"check": "simulate_dependence", **res.to_json()})
        return 0 if ok else 1
    res = distributions.asymptotic_dominance_probe(args.n, args.seed,
                                                   samples=args.samples)
    _emit(out, {"check": "simulate_asymptotic", "n": res.n,
                "worst_shortfall": res.worst_shortfall,
                "cells": len(res.cells), "passed": res.passed})
    return 0 if res.passed else 1


def _cmd_verify(args, out) -> int:
    config = RunConfig(
        seed=args.seed,
        max_n=args.max_n,
        num_instances=args.instances,
        mc_samples=args.samples,
        series_truncation=args.truncate,
        inject_fault=args.inject_fault,
        threads=args.threads if args.threads else RunConfig.from_env_threads(),
    )
    results = run_verify_suite(config)
    for res in sorted(results, key=lambda r: r.check_id):
        _emit(out, res.to_json())
    return 0 if all(r.passed for r in results) else 1


def _cmd_random(args, out) -> int:
    profile = random_instance(args.n, args.seed)
    out.write(serialize_instance(profile) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smcensus",
        description="stable matching census: enumeration, grids, bounds, verification")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON-lines report to FILE")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    def add_instance_args(p):
        p.add_argument("--in", dest="infile", help="instance JSON file")
        p.add_argument("--n", type=int, help="random instance side size")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("enumerate", help="count stable matchings")
    add_instance_args(p)
    p.add_argument("--method", choices=("brute", "rotations", "both"),
                   default="both")

    p = sub.add_parser("rotations", help="rotation poset and structure checks")
    add_instance_args(p)

    p = sub.add_parser("grids", help="tangled grid embedding or diamond grids")
    add_instance_args(p)
    p.add_argument("--diamond", type=int, help="diamond grid side size")

    p = sub.add_parser("bounds", help="exponential bound report")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--series", choices=tuple(SERIES_VARIANTS))
    p.add_argument("--truncate", type=int, default=10 ** 7)

    p = sub.add_parser("series", help="series constant enclosures")
    p.add_argument("--which", choices=tuple(SERIES_VARIANTS), required=True)
    p.add_argument("--truncate", type=int, default=10 ** 7)

    p = sub.add_parser("simulate", help="samplers and Monte Carlo checks")
    p.add_argument("--kind", choices=("cyclic", "plain", "extended",
                                      "dependence", "asymptotic"),
                   required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10 ** 5)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", choices=("all",), default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-n", dest="max_n", type=int, default=7)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--truncate", type=int, default=10 ** 7)
    p.add_argument("--inject-fault", action="store_true",
                   help="negative control: corrupt one enumeration")
    p.add_argument("--threads", type=int, default=0,
                   help="worker count (default: SMCENSUS_THREADS or 1)")

    p = sub.add_parser("random", help="emit a random instance as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


_HANDLERS = {
    "enumerate": _cmd_enumerate,
    "rotations": _cmd_rotations,
    "grids": _cmd_grids,
    "series": _cmd_series,
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "random": _cmd_random,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify" and args.suite != "all":  # pragma: no cover
        return 2
    out = sys.stdout
    close = False
    if getattr(args, "out", None):
        out = open(args.out, "w", encoding="utf-8")
        close = True
    try:
        return _HANDLERS[args.command](args, out)
    finally:
        if close:
            out.close()


if __name__ == "__main__":
    raise SystemExit(main())
