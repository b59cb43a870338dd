"""``spinctl`` command line: run, validate, circuit.

Exit codes: 0 success, 2 config error, 3 runtime or numeric error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .chain import dumps_circuit
from .config import FIELD_TYPES, ConfigError, ExperimentConfig, load_config
from .experiments import build_spec, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

logger = logging.getLogger("spinctl")


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("config overrides")
    for key in FIELD_TYPES:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        group.add_argument(*flags, dest=key, default=None, metavar=FIELD_TYPES[key].upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinctl", description="Trotterized variational control of XXZ spin chains.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run the configured experiment and write CSV files"),
        ("validate", "parse and check a config without running it"),
        ("circuit", "print the compiled circuit for the initial parameters"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="key = value config file")
        _add_overrides(p)
    return parser


def _report(summary) -> None:
    for kind in summary.realizations:
        done = summary.completed(kind)
        failed = len(summary.realizations[kind]) - len(done)
        ttt = summary.time_to_threshold.get(kind)
        print(
            f"{kind}: {len(done)} completed, {failed} failed, "
            f"mean final J = {summary.mean_final_J.get(kind, float('nan')):.3e}, "
            f"mean final F = {summary.mean_final_F.get(kind, float('nan')):.6f}, "
            f"time-to-threshold = {'never' if ttt is None else ttt}"
        )
        wall = sum(r.wall_time for r in summary.realizations[kind])
        logger.info("%s wall time %.2fs", kind, wall)
    if summary.robustness_ratio is not None:
        print(f"robustness ratio (global/local) = {summary.robustness_ratio:.4f}")
    if summary.best_terminal_F is not None:
        print(f"best terminal F = {summary.best_terminal_F:.8f} (realization {summary.best.index})")
    for flag in summary.flags:
        print(f"FLAG: {flag}")
    for path in summary.files:
        logger.info("wrote %s", path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = {key: getattr(args, key) for key in FIELD_TYPES}
    try:
        config: ExperimentConfig = load_config(args.config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"ok: {config.experiment}, schemes {', '.join(config.schemes)}")
        return EXIT_OK

    try:
        if args.command == "circuit":
            if len(config.schemes) != 1:
                print("config error: circuit needs a single scheme (use --scheme)", file=sys.stderr)
                return EXIT_CONFIG
            spec = build_spec(config, config.schemes[0])
            sys.stdout.write(dumps_circuit(spec.circuit(spec.scheme.initial_params(config.seed))))
            return EXIT_OK
        summary = run_experiment(config)
    except (RuntimeError, ValueError, FloatingPointError, np.linalg.LinAlgError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _report(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
