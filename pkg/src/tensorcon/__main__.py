"""python -m tensorcon -- Build, evaluate and verify constrained expressions."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from tensorcon.commands import DEFAULT_GRID, RunConfig
from tensorcon.errors import ConfigError, TensorconError
from tensorcon.main import create_workbench, load_config


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorcon",
        description="Constrained expressions: functions that satisfy boundary constraints for any free function.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    with_config = argparse.ArgumentParser(add_help=False, parents=[common])
    with_config.add_argument("--config", type=Path, required=True, help="problem config (JSON)")
    with_config.add_argument("--grid", type=_ints, default=(DEFAULT_GRID,), help="points per axis: N or N,M,...")
    with_config.add_argument("--tol", type=float, help="boundary tolerance override")

    p = sub.add_parser("eval", parents=[with_config], help="evaluate f on a grid (CSV)")
    p.add_argument("--partial", type=_ints, help="extra derivative column, e.g. 0,1 for df/dy")
    sub.add_parser("verify", parents=[with_config], help="check boundary residuals and compatibility (JSON)")
    sub.add_parser("solve-pde", parents=[with_config], help="solve the config's PDE (CSV)")
    sub.add_parser("table-sweep", parents=[common], help="check every tabulated Dirichlet/Neumann combination")
    return parser


def _configure_logging(verbose: int) -> None:
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
    else:
        level = os.environ.get("TENSORCON_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _write(out: Path | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output: {exc.strerror}", str(out)) from exc


def run(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns the exit status."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    bench = create_workbench()
    commands = bench.commands

    run_config = RunConfig(
        mode=args.mode,
        config=getattr(args, "config", None),
        out=args.out,
        grid=getattr(args, "grid", (DEFAULT_GRID,)),
        seed=args.seed,
        tolerance=getattr(args, "tol", None),
        partial=getattr(args, "partial", None),
    )
    if run_config.mode == "table-sweep":
        report = commands.cmd_table_sweep(run_config.seed)
        _write(run_config.out, report.render() + "\n")
        return 0 if report.passed else 1

    problem = load_config(run_config.config, bench)
    if run_config.mode == "eval":
        _write(run_config.out, commands.cmd_eval(run_config, problem))
        return 0
    if run_config.mode == "solve-pde":
        _write(run_config.out, commands.cmd_solve_pde(run_config, problem))
        return 0
    report = commands.cmd_verify(run_config, problem)
    _write(run_config.out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0 if report.passed else 1


def main(argv: Sequence[str] | None = None) -> None:
    try:
        status = run(argv)
    except TensorconError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None
    raise SystemExit(status)


if __name__ == "__main__":
    main()
