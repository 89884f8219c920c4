"""Command-line entry point: ``crmc-sim {run,bench,list-scenarios}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .bench import OPERATION_COUNTS, bench_sweep
from .harness import emit_csv, run_scenario, summarize
from .scenarios import ConfigError, builtin_scenarios, load_scenario

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2
SEED_MAX = 2 ** 64 - 1

log = logging.getLogger("crmc")


def _seed(text):
    value = int(text)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _csv_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crmc-sim",
        description="Monte-Carlo adaptive beamforming in impulsive noise.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file or built-in scenario")
    run.add_argument("scenario", help="path to a YAML scenario file or a built-in name")
    run.add_argument("--seed", type=_seed, help="override the base seed")
    run.add_argument("--trials", type=_positive, help="override the number of trials")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--algorithms", type=_csv_list,
                     help="comma-separated subset of the configured algorithms")
    run.add_argument("--workers", type=_positive, default=1,
                     help="worker processes for trials (output is identical)")

    bench = sub.add_parser("bench", help="time one step of every algorithm")
    bench.add_argument("--sizes", type=_csv_list, default=["8", "16", "32"],
                       help="comma-separated filter lengths (default: 8,16,32)")
    bench.add_argument("--iterations", type=_positive, default=100)
    bench.add_argument("--batch", type=_positive, default=512,
                       help="filters stepped in lockstep per call")
    bench.add_argument("--seed", type=_seed, default=0)
    bench.add_argument("--algorithms", type=_csv_list)
    bench.add_argument("--out", help="also write bench.csv into this directory")

    sub.add_parser("list-scenarios", help="list built-in scenarios")
    return parser


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if changes:
        scenario = scenario.with_overrides(**changes)
    if args.algorithms:
        scenario = scenario.select_algorithms(args.algorithms)
    log.info("running %s: %d trials x %d iterations, algorithms %s", scenario.name,
             scenario.trials, scenario.iterations, ",".join(scenario.algorithms))
    Path(args.out).mkdir(parents=True, exist_ok=True)
    records = run_scenario(scenario, workers=args.workers)
    paths = emit_csv(records, args.out)
    for row in summarize(records):
        print(f"{row['algorithm']:>5}  diverged {row['diverged_fraction']:6.1%}  "
              f"median final error {row['median_final_error_db']:8.2f} dB")
    for path in paths.values():
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes]
    except ValueError as exc:
        raise ConfigError(f"bad --sizes: {exc}") from exc
    if any(m < 2 for m in sizes):
        raise ConfigError("bench sizes must be >= 2")
    unknown = set(args.algorithms or ()) - set(OPERATION_COUNTS)
    if unknown:
        raise ConfigError(f"unknown algorithms {sorted(unknown)}")
    results = bench_sweep(sizes, iterations=args.iterations, batch=args.batch,
                          seed=args.seed, algorithms=args.algorithms)
    rows = [(m, name, t) for m, times in results.items() for name, t in times.items()]
    print(f"{'M':>4} {'algorithm':>9} {'ns/step':>12} {'mults':>7}")
    for m, name, t in rows:
        print(f"{m:>4} {name:>9} {t:12.1f} {OPERATION_COUNTS[name](m):>7}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with (out / "bench.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("num_taps", "algorithm", "mean_step_time_ns", "multiplications"))
            for m, name, t in rows:
                writer.writerow((m, name, f"{t:.9g}", OPERATION_COUNTS[name](m)))
    return EXIT_OK


def _cmd_list(args) -> int:
    for name, sc in builtin_scenarios().items():
        print(f"{name:<12} {sc.kind:<12} M={sc.elements:<3} iterations={sc.iterations:<5} "
              f"trials={sc.trials:<4} algorithms={','.join(sc.algorithms)}")
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "bench": _cmd_bench, "list-scenarios": _cmd_list}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
