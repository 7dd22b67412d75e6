"""Command line front end: ``hspkit solve | bench | verify``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import (
    MODES,
    CrossCheckMismatch,
    SuiteConfig,
    parse_family,
    records_to_csv,
    records_to_json,
    run_one,
    run_suite,
    summarize,
)
from .group import CAP_ENV, CapExceeded, parse_elements, parse_signature
from .oracle import load_instance_file
from .verify import ALGORITHMS, AuditConfig


def _emit(records, fmt: str, out: str | None) -> None:
    text = records_to_json(records) if fmt == "json" else records_to_csv(records)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _audit_config(args) -> AuditConfig:
    return AuditConfig(args.decide_scale, args.decide_offset, args.identify_scale)


def cmd_solve(args) -> int:
    if args.instance_file:
        sig, gens = load_instance_file(args.instance_file)
    else:
        if args.group is None:
            raise ValueError("solve needs --group or --instance-file")
        sig = parse_signature(args.group)
        gens = parse_elements(args.gens, sig)
    rec = run_one(sig, gens, args.algo, "0", _audit_config(args), debug=args.debug)
    if rec.crosscheck is False:
        raise CrossCheckMismatch(f"{args.algo} disagrees with brute force on {sig}: got {rec.result}")
    _emit([rec], args.format, args.out)
    return 0 if rec.passed else 1


def cmd_bench(args) -> int:
    signatures = list(args.group or [])
    for fam in args.family or []:
        signatures.extend(parse_family(fam))
    config = SuiteConfig(
        signatures=signatures,
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        audit=_audit_config(args),
        debug=args.debug,
    )
    if args.algo:
        config.algorithms = list(args.algo)
    records = run_suite(config, jobs=args.jobs)
    _emit(records, args.format, args.out)
    ok = summarize(records, write=lambda s: print(s, file=sys.stderr))
    return 0 if ok else 1


def cmd_verify(args) -> int:
    from .battery import run_all

    return 0 if run_all() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hspkit", description=__doc__)
    parser.add_argument("--cap", type=int, default=None, help=f"enumeration cap (overrides ${CAP_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--debug", action="store_true", help="enable solver runtime invariant checks")
        p.add_argument("--decide-scale", type=float, default=10.0)
        p.add_argument("--decide-offset", type=float, default=10.0)
        p.add_argument("--identify-scale", type=float, default=12.0)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    p.add_argument("--group", help='signature, e.g. "2^3,3"')
    p.add_argument("--gens", default="", help='semicolon-separated elements, e.g. "(1,0);(0,2)"')
    p.add_argument("--instance-file", help='JSON file {"sig": ..., "generators": [...]}')
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run algorithms over a generated instance suite")
    p.add_argument("--group", action="append", help="signature; repeat for several")
    p.add_argument("--family", action="append", help='"p:nmin-nmax" adds Z_p^n for each n')
    p.add_argument("--mode", choices=MODES, default="all-subgroups")
    p.add_argument("--algo", action="append", choices=ALGORITHMS, help="repeat for several (default: decide-abelian and identify-abelian)")
    p.add_argument("--count", type=int, default=5, help="draws per signature in random-subgroups mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the built-in property batteries")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    saved = os.environ.get(CAP_ENV)
    if args.cap is not None:
        os.environ[CAP_ENV] = str(args.cap)
    try:
        return args.func(args)
    except (ValueError, CapExceeded, CrossCheckMismatch, OSError) as exc:
        print(f"hspkit: error: {exc}", file=sys.stderr)
        return 2
    finally:
        # worker processes inherit the variable; restore it for in-process callers
        if saved is None:
            os.environ.pop(CAP_ENV, None)
        else:
            os.environ[CAP_ENV] = saved


if __name__ == "__main__":
    sys.exit(main())
