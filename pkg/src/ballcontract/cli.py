"""Command-line front end: ``gen``, ``volume``, ``bounds`` and ``verify``.

Exit statuses are a stable contract:

* 0: success, or every counted check passed or was inconclusive
* 1: a verification check failed
* 2: usage or configuration error
* 3: input data error (unreadable instance file, failed certificate)

No command has a default seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds, instances, streams
from .ball_bodies import BallRegion
from .estimates import VolumeEstimate
from .instances import CertificationError, REGIMES, STRATEGIES
from .norms import parse_norm
from .verify import (InstanceRecord, SuiteConfig, SuiteReport, instance_summary, run_suite,
                     verify_instance)
from .volumetry import exact_area_2d, grid_bounds, mc_volume

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3
KIND_NAMES = {"union": "molecule", "intersection": "polyhedron", "hull": "r_hull"}


class UsageError(Exception):
    """Bad flags or configuration; maps to exit status 2."""


class DataError(Exception):
    """Bad input data; maps to exit status 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str) -> instances.UniformContractionInstance:
    try:
        return instances.load(path)
    except FileNotFoundError as exc:
        raise DataError(f"{path}: no such file") from exc
    except CertificationError as exc:
        raise DataError(f"{path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"{path}: {exc}") from exc


# -- gen -------------------------------------------------------------------------------


def cmd_gen(args) -> int:
    try:
        K = parse_norm(args.norm, args.dim)
    except (ValueError, OSError) as exc:
        raise UsageError(f"--norm: {exc}") from exc
    try:
        inst = instances.gen_instance(args.dim, args.n, args.lam, K, args.regime, args.seed,
                                      strategy=args.strategy, r=args.r,
                                      sub_factor=args.sub_factor, super_factor=args.super_factor)
    except CertificationError as exc:
        raise DataError(f"generation failed: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = json.dumps(inst.to_dict(), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    cert = inst.certificate()
    lines = [cert.describe(),
             f"regime {inst.regime}: r = {inst.r!r}, cr_K(P) = {inst.cr!r}, lambda = {inst.lam!r}"]
    lines += [f"note: {n}" for n in inst.notes]
    if args.out:
        print("\n".join(lines))
    else:
        sys.stdout.write(text)
        print("\n".join(lines), file=sys.stderr)
    return EXIT_OK


# -- volume ------------------------------------------------------------------------------


def cmd_volume(args) -> int:
    inst = _load_instance(args.instance)
    points = inst.P if args.side == "P" else inst.Q
    r = inst.r if args.r is None else args.r
    region = BallRegion(KIND_NAMES[args.kind], points, r, inst.norm)
    try:
        if args.method == "exact2d":
            est = exact_area_2d(region)
        elif args.method == "grid":
            lo, hi = grid_bounds(region, args.resolution)
            est = VolumeEstimate(0.5 * (lo + hi), lo, hi, "grid-bound",
                                 note=f"{args.resolution}^{region.dim} cells")
        else:
            if args.seed is None:
                raise UsageError("--method mc needs --seed")
            est = mc_volume(region, args.samples, args.seed, args.confidence, args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"instance": args.instance, "side": args.side, "kind": args.kind, "r": r,
           **est.to_dict()}
    if args.format == "machine":
        text = json.dumps(doc, indent=1) + "\n"
    elif args.format == "csv-table":
        keys = list(doc)
        text = ",".join(keys) + "\n" + ",".join(str(doc[k]) for k in keys) + "\n"
    else:
        text = (f"{args.kind} of {args.side} at r = {r!r}: {est.value!r} "
                f"in [{est.lo!r}, {est.hi!r}] ({est.method}"
                + (f", {est.samples} samples, seed {est.seed}, confidence {est.confidence}"
                   if est.method == "monte-carlo" else "")
                + (f"; {est.note}" if est.note else "") + ")\n")
    _emit(text, args.out)
    return EXIT_OK


# -- bounds -----------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    try:
        report = bounds.bounds_report(args.r, args.lam, args.dim, args.n, V_K=args.vk, k=args.k,
                                      cr=args.cr, d0=args.d0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "machine":
        text = json.dumps(report.to_dict(), indent=1) + "\n"
    elif args.format == "csv-table":
        rows = ["key,value,applicable,clamped,margin,reason"]
        for e in report.entries.values():
            rows.append(",".join(str(x) for x in (e.key, e.value, e.applicable, e.clamped,
                                                  "" if e.margin is None else e.margin,
                                                  json.dumps(e.reason or ""))))
        text = "\n".join(rows) + "\n"
    else:
        text = "\n".join(report.lines()) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------------


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t)


def _parse_n_values(text: str) -> dict[int, tuple[int, ...]]:
    """``2:4,9;3:8,27`` to ``{2: (4, 9), 3: (8, 27)}``."""
    out = {}
    for part in text.split(";"):
        d, _, ns = part.partition(":")
        out[int(d)] = _parse_ints(ns)
    return out


def _suite_config(args) -> SuiteConfig:
    doc: dict = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("--config must hold a JSON object")
        doc.pop("jobs", None)
    try:
        overrides = _overrides(args)
    except ValueError as exc:
        raise UsageError(f"malformed list flag: {exc}") from exc
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if "n_values" in doc and isinstance(doc["n_values"], dict):
        doc["n_values"] = {int(d): tuple(ns) for d, ns in doc["n_values"].items()}
    if "seed" not in doc:
        raise UsageError("verify needs --seed or a seed in --config")
    try:
        return SuiteConfig.from_dict(doc)
    except (AttributeError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid suite config: {exc}") from exc


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "dims": None if args.dims is None else _parse_ints(args.dims),
        "norms": None if args.norms is None else tuple(args.norms.split(",")),
        "regimes": None if args.regimes is None else tuple(args.regimes.split(",")),
        "instances_per_regime": args.instances_per_regime,
        "n_values": None if args.n_values is None else _parse_n_values(args.n_values),
        "lam": args.lam,
        "samples": args.samples,
        "confidence": args.confidence,
        "quermass_k": None if args.quermass_k is None else _parse_ints(args.quermass_k),
        "direction_samples": args.direction_samples,
        "vol_samples": args.vol_samples,
        "formulas": False if args.no_formulas else None,
    }


def cmd_verify(args) -> int:
    config = _suite_config(args)
    if args.instance:
        loaded = [(p, _load_instance(p)) for p in args.instance]
        params = config.params()

        def work(item):
            path, inst = item
            return InstanceRecord(Path(path).name, instance_summary(inst),
                                  verify_instance(inst, params, config.quermass_k))
        records = streams.ordered_map(work, loaded, jobs=args.jobs)
        report = SuiteReport(config.echo(), records)
    else:
        report = run_suite(config, jobs=args.jobs)
    text = report.render(args.format)
    _emit(text, args.out)
    if args.summary and args.format != "text":
        Path(args.summary).write_text(report.to_text())
    if args.out and args.format != "text":
        sys.stdout.write(report.to_text())
    return report.exit_code


# -- parser ----------------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _confidence(text: str) -> float:
    v = float(text)
    if not 0.5 < v < 1:
        raise argparse.ArgumentTypeError("must lie in (0.5, 1)")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ballcontract", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shared(p, seed_required=False, sampling=True):
        p.add_argument("--seed", type=int, required=seed_required)
        if sampling:
            p.add_argument("--samples", type=_positive_int, default=None)
            p.add_argument("--confidence", type=_confidence, default=None)
        p.add_argument("--jobs", type=_positive_int, default=1)
        p.add_argument("--format", choices=("text", "machine", "csv-table"), default="text")
        p.add_argument("--out", default=None, help="output file (default: standard output)")

    g = sub.add_parser("gen", help="generate a certified instance file")
    g.add_argument("--dim", type=_positive_int, required=True)
    g.add_argument("--norm", required=True,
                   help="euclid, l1, linf, lp:<p>, poly-h:<file> or poly-v:<file>")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    g.add_argument("--regime", choices=REGIMES, required=True)
    g.add_argument("--r", type=_positive_float, default=None, help="override the regime radius")
    g.add_argument("--strategy", choices=STRATEGIES, default="lattice")
    g.add_argument("--sub-factor", type=_positive_float, default=instances.SUB_LAMBDA_FACTOR,
                   help="sub-lambda regime radius as a multiple of lambda")
    g.add_argument("--super-factor", type=_positive_float, default=instances.SUPER_FACTOR,
                   help="super regime radius is this multiple of cr_K(P) plus lambda")
    shared(g, seed_required=True, sampling=False)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("volume", help="volume of a region built from an instance file")
    v.add_argument("instance")
    v.add_argument("--side", choices=("P", "Q"), required=True)
    v.add_argument("--kind", choices=tuple(KIND_NAMES), required=True)
    v.add_argument("--method", choices=("mc", "exact2d", "grid"), default="mc")
    v.add_argument("--r", type=_positive_float, default=None, help="radius (default: the instance's)")
    v.add_argument("--resolution", type=_positive_int, default=256, help="grid cells per axis")
    shared(v)
    v.set_defaults(func=cmd_volume, samples=200_000, confidence=0.99)

    b = sub.add_parser("bounds", help="closed-form bounds for given parameters")
    b.add_argument("--r", type=_positive_float, required=True)
    b.add_argument("--lambda", dest="lam", type=_positive_float, required=True)
    b.add_argument("--dim", type=_positive_int, required=True)
    b.add_argument("--n", type=_positive_int, required=True)
    b.add_argument("--k", type=int, default=None, help="quermassintegral index")
    b.add_argument("--vk", type=_positive_float, default=None, help="unit ball volume (default omega_d)")
    b.add_argument("--cr", type=_positive_float, default=None, help="circumradius for the packing ratio")
    b.add_argument("--d0", type=_positive_int, default=None,
                   help="dimension from which the large-d lemmas are assumed to hold")
    shared(b, sampling=False)
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("verify", help="run a verification suite or verify instance files")
    s.add_argument("--config", default=None, help="suite config JSON")
    s.add_argument("--instance", action="append", default=None,
                   help="verify this instance file instead of a generated matrix (repeatable)")
    s.add_argument("--dims", default=None, help="e.g. 2,3")
    s.add_argument("--norms", default=None, help="e.g. euclid,l1,linf,lp:3")
    s.add_argument("--regimes", default=None)
    s.add_argument("--instances-per-regime", type=int, default=None)
    s.add_argument("--n-values", default=None, help="e.g. '2:4,9;3:8,27'")
    s.add_argument("--lambda", dest="lam", type=_positive_float, default=None)
    s.add_argument("--quermass-k", default=None, help="e.g. 0,1")
    s.add_argument("--direction-samples", type=_positive_int, default=None)
    s.add_argument("--vol-samples", type=_positive_int, default=None)
    s.add_argument("--no-formulas", action="store_true")
    s.add_argument("--summary", default=None, help="also write the text table here")
    shared(s)
    s.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"ballcontract: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"ballcontract: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
