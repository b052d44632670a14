"""Command-line interface.

    qdemission simulate --config run.yaml [--mode MODE] [--out DIR]
                        [--threads N] [--check]

Flags override the corresponding config-file keys.  `--check` runs the
structural invariant suite on the configured parameter point instead of the
experiment and exits non-zero on any failed check.
"""

from __future__ import annotations

import argparse
import sys

from .config import MODES, parse_config
from .runner import run_checks, run_experiment


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qdemission",
        description="Photon emission of a phonon-coupled driven quantum dot")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured experiment")
    sim.add_argument("--config", required=True, help="YAML config file")
    sim.add_argument("--mode", choices=MODES, help="override config mode")
    sim.add_argument("--out", help="override output directory")
    sim.add_argument("--threads", type=int, help="sweep rows computed concurrently")
    sim.add_argument("--check", action="store_true",
                     help="run the invariant suite on the configured point")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command != "simulate":
        raise SystemExit(2)
    overrides = {"mode": args.mode, "output": args.out, "threads": args.threads}
    config = parse_config(args.config, overrides=overrides)

    if args.check:
        checks = run_checks(config)
        width = max(len(name) for name, _, _ in checks)
        failed = 0
        for name, ok, detail in checks:
            print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
            failed += 0 if ok else 1
        print(f"{len(checks) - failed}/{len(checks)} checks passed")
        return 1 if failed else 0

    result = run_experiment(config)
    print(f"wrote {result['csv']} ({result['n_rows']} rows, "
          f"{result['n_failed']} failed)")
    print(f"wrote {result['meta']}")
    return 1 if result["n_failed"] else 0


if __name__ == "__main__":
    sys.exit(main())
