"""Command line entry point.

    gdr run --config run.cfg [--seed N] [--out results.csv]
    gdr sweep --config run.cfg --key epsilon --values 0.1,0.01,0.001
    gdr gradcheck [--instances 20] [--seed 0]
    gdr version

Exit codes: 0 success, 1 configuration (or I/O) error, 2 numeric abort.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from gdr import __version__
from gdr.config import RunConfig, load_config, parse_value
from gdr.errors import ConfigError, NumericError
from gdr.gradcheck import TOLERANCE, run_gradcheck
from gdr.harness import run, write_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2


def _execute(cfg: RunConfig, out: str) -> None:
    start = time.perf_counter()
    logs = run(cfg)
    write_csv(logs, out)
    print(f"{cfg.algo} on {cfg.env} (seed {cfg.seed}): {len(logs)} generations in "
          f"{time.perf_counter() - start:.1f}s -> {out}")


def sweep_path(out: str, key: str, value: str) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_{key}-{value}{p.suffix or '.csv'}"))


def cmd_run(args) -> None:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_values(seed=args.seed)
    _execute(cfg, args.out or cfg.output)


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_values(seed=args.seed)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs at least one value")
    # validate every value before spending time on the first run
    configs = [(v, cfg.with_values(**{args.key: parse_value(args.key, v)})) for v in values]
    for raw, c in configs:
        _execute(c, sweep_path(args.out or cfg.output, args.key, raw))


def cmd_gradcheck(args) -> int:
    start = time.perf_counter()
    worst = run_gradcheck(args.instances, args.seed)
    ok = True
    for name, err in worst.items():
        passed = err < TOLERANCE
        ok &= passed
        print(f"{name:18s} max relative error {err:.3e}  {'ok' if passed else 'FAIL'}")
    print(f"{args.instances} instances in {time.perf_counter() - start:.1f}s")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gdr", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress on evaluation generations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment and write its CSV log")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="run one experiment per value of a config key")
    p.add_argument("--config", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="base output path; files are suffixed with _<key>-<value>")

    p = sub.add_parser("gradcheck", help="compare analytic TD3 gradients with finite differences")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    sub.add_parser("version", help="print the package version")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "run":
            cmd_run(args)
        elif args.command == "sweep":
            cmd_sweep(args)
        elif args.command == "gradcheck":
            return cmd_gradcheck(args)
        else:
            print(__version__)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
