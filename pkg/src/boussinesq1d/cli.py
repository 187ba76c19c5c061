"""Command-line entry point: run, sweep, check-recursion, verify."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from . import checkpoint, runner
from .certificate import induction_holds, recursion_iterate
from .config import ConfigError, load_config


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boussinesq1d", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one configuration and write its artifacts")
    p.add_argument("config", nargs="?", help="config JSON (omit with --resume)")
    p.add_argument("--out", help="output directory (overrides the config and the output-root variable)")
    p.add_argument("--resume", metavar="RUN_DIR", help="restart from a checkpoint of an earlier run directory")
    p.add_argument("--step", type=int, help="checkpoint step to resume from (default: latest)")

    p = sub.add_parser("sweep", help="run one configuration for several M in parallel")
    p.add_argument("config")
    p.add_argument("--M", type=_floats, default=[], help="comma-separated list, e.g. 50,100,200")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")

    p = sub.add_parser("check-recursion", help="iterate the lower-bound recursion and compare with 3n+6")
    p.add_argument("--a1", type=float, default=9.0)
    p.add_argument("--n", type=int, default=50)

    p = sub.add_parser("verify", help="recompute diagnostics and certificate from stored checkpoints")
    p.add_argument("run_dir")
    return parser


def _cmd_run(args) -> int:
    if args.resume:
        if args.step is None:
            try:
                files = checkpoint.list_dir(os.path.join(args.resume, "checkpoints"))
            except OSError as exc:
                print(f"I/O failure: {exc}", file=sys.stderr)
                return runner.EXIT_IO
            if not files:
                print(f"no checkpoints in {args.resume}", file=sys.stderr)
                return runner.EXIT_IO
            args.step = checkpoint.read(files[-1])[0]
        out = args.out or args.resume + "-resumed"
        result = runner.resume(args.resume, args.step, out)
    elif args.config is None:
        print("config error: run needs a config file or --resume", file=sys.stderr)
        return runner.EXIT_CONFIG
    else:
        try:
            config = load_config(args.config)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return runner.EXIT_CONFIG
        result = runner.run(config, args.out)
    stream = sys.stdout if result.exit_code == 0 else sys.stderr
    print(f"{result.output_dir}: {result.message}", file=stream)
    return result.exit_code


def _cmd_sweep(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return runner.EXIT_CONFIG
    try:
        rows = runner.sweep(config, args.M, workers=args.workers, output_dir=args.out)
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return runner.EXIT_IO
    for row in rows:
        print(f"M={row['M']:g}  exit={row['exit_code']}  {row.get('reason')}  flag_time={row.get('flag_time')}")
    return runner.EXIT_OK


def _cmd_recursion(args) -> int:
    if args.n < 1:
        print("--n must be >= 1", file=sys.stderr)
        return runner.EXIT_CONFIG
    states = recursion_iterate(args.a1, args.n)
    print(f"{'n':>4} {'a_n':>14} {'3n+6':>6}  ok")
    for s in states:
        value = f">={s.value:g}" if s.saturated else f"{s.value:.8g}"
        print(f"{s.n:>4} {value:>14} {3 * s.n + 6:>6}  {'yes' if s.at_least(3 * s.n + 6) else 'no'}")
    holds = induction_holds(states)
    if holds is None:
        print("a_1 < 9: the induction hypothesis does not apply")
        return runner.EXIT_OK
    print("a_n >= 3n+6 for all n" if holds else "bound a_n >= 3n+6 fails")
    return runner.EXIT_OK if holds else runner.EXIT_MISMATCH


def _cmd_verify(args) -> int:
    result = runner.verify(args.run_dir)
    stream = sys.stdout if result.exit_code == 0 else sys.stderr
    print(f"{args.run_dir}: {result.message}", file=stream)
    return result.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "check-recursion": _cmd_recursion, "verify": _cmd_verify}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
