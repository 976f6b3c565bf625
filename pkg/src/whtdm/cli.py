"""Command line entry point.

    whtdm simulate --config sweep.cfg --out results.csv [--set key=value ...]
    whtdm summarize --in results.csv [--out summary.csv]
    whtdm complexity-table [--format text|csv|both]
    whtdm selftest
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import complexity, harness, selftest
from .config import load_config

log = logging.getLogger("whtdm")


def _simulate(args) -> int:
    cfg = load_config(args.config, args.set)
    records = harness.run_sweep(cfg, workers=args.workers)
    harness.write_csv(records, args.out)
    log.info("wrote %d records to %s", len(records), args.out)
    return 0


def _summarize(args) -> int:
    rows = harness.summarize(harness.read_csv(args.infile), args.expected_seeds)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(harness.summary_to_csv(rows))
    print(harness.summary_to_text(rows))
    incomplete = [r for r in rows if not r.complete]
    for r in incomplete:
        log.warning("incomplete cell %s: %d seed(s)", r.cell, r.n_seeds)
    return 1 if incomplete else 0


def _complexity(args) -> int:
    rows = complexity.complexity_table(args.M, args.N)
    if args.format in ("text", "both"):
        print(complexity.format_table_text(rows))
    if args.format == "both":
        print()
    if args.format in ("csv", "both"):
        sys.stdout.write(complexity.format_table_csv(rows))
    return 0


def _selftest(args) -> int:
    return 0 if selftest.run() else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="whtdm", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a BER sweep")
    s.add_argument("--config", help="key = value config file")
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key (repeatable)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=_simulate)

    s = sub.add_parser("summarize", help="seed-mean BER per cell")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", help="also write the summary as CSV")
    s.add_argument("--expected-seeds", type=int)
    s.set_defaults(func=_summarize)

    s = sub.add_parser("complexity-table", help="transmitter operation counts")
    s.add_argument("--format", choices=("text", "csv", "both"), default="both")
    s.add_argument("-M", type=int, default=64)
    s.add_argument("-N", type=int, default=16)
    s.set_defaults(func=_complexity)

    s = sub.add_parser("selftest", help="run the built-in oracle checks")
    s.set_defaults(func=_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2) if args.verbose else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, harness.SweepError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
