"""Command-line entry point: ``jacobi-mz list`` and ``jacobi-mz run <config>``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .experiments import list_experiments, load_config, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacobi-mz", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiments and their config keys")
    run = sub.add_parser("run", help="run the experiment described by a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    run.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
    run.add_argument("--threads", type=int, default=1, help="worker threads for ensemble cells")
    return parser


def write_outputs(report, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.json"]
    written[0].write_text(report.to_json() + "\n", encoding="utf-8")
    for name, profile in report.profiles.items():
        path = out / f"{report.experiment}_{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            profile.to_csv(fh)
        written.append(path)
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_experiments())
        return EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        raw = load_config(args.config)
        if args.threads > 1:
            with ThreadPoolExecutor(args.threads) as pool:
                report = run_experiment(raw, args.seed, pool)
        else:
            report = run_experiment(raw, args.seed)
    except (OSError, ValueError) as exc:  # ConfigError and invalid parameter values
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in write_outputs(report, args.out):
        print(path)
    print(f"{report.experiment}: {report.verdict}")
    return EXIT_FAIL if report.verdict == "FAIL" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
