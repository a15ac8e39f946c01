"""Command line: ``tricell run|bench|verify``."""

from __future__ import annotations

import argparse
import sys

from .core import ConfigurationError
from .harness import BenchConfig, ScenarioError, run_benchmark, run_scenario, verify


def _run(args) -> int:
    result = run_scenario(args.config)
    if result.has_averages:
        print(f"E/N = {result.energy_per_N:.6f}  P = {result.pressure:.6f}  "
              f"samples = {len(result.samples)}")
    else:
        print("no production samples; averages absent")
    print(f"outputs in {result.output_dir}")
    return 0


def _bench(args) -> int:
    cfg = BenchConfig.from_file(args.config)
    report = run_benchmark(cfg)
    report.write(cfg.output)
    for r in report.rows:
        flag = "  (CV > 10%)" if r.noisy else ""
        print(f"{r.traversal.value} {r.cutoff.value:7s} threads={r.threads:<3d} "
              f"wall={r.wall_seconds:.4f}s mmups={r.mmups:.5f} hitrate={r.hitrate:.2f}% "
              f"speedup={r.speedup:.2f}{flag}")
    print(f"report written to {cfg.output}")
    return 0


def _verify(args) -> int:
    return 0 if verify(seed=args.seed) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tricell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an NVT scenario from a key = value file")
    p.add_argument("config")
    p.set_defaults(func=_run)
    p = sub.add_parser("bench", help="time the three-body routine per traversal and cutoff")
    p.add_argument("config")
    p.set_defaults(func=_bench)
    p = sub.add_parser("verify", help="oracle and coverage checks on small random systems")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_verify)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
