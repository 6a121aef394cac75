"""Command-line front end: ``scuq run|validate|list-experiments``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigurationError, ScuqError, StateError
from .experiments import (DESCRIPTIONS, EXPERIMENTS, apply_overrides, load_config, run_experiment,
                          shipped_config_path, validate_config)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scuq", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config (path or shipped id)")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--seed", type=_seed)
    run.add_argument("--samples", type=_positive_int, help="Monte Carlo sample count M")
    run.add_argument("--threads", type=_positive_int,
                     help="worker processes for PDE solves (default: $SCUQ_THREADS or CPU count)")

    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")

    sub.add_parser("list-experiments", help="list the shipped experiment configs")
    return parser


def _read(source):
    try:
        return load_config(source), None
    except OSError as exc:
        return None, f"cannot read {source}: {exc.strerror or exc}"
    except json.JSONDecodeError as exc:
        return None, f"{source}: invalid JSON ({exc})"


def cmd_validate(args) -> int:
    cfg, err = _read(args.config)
    if err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    problems = validate_config(cfg)
    if problems:
        for p in problems:
            print(p)
        return EXIT_USAGE
    print("ok")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg, err = _read(args.config)
    if err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    cfg = apply_overrides(cfg, seed=args.seed, samples=args.samples, threads=args.threads)
    problems = validate_config(cfg)
    if problems:
        for p in problems:
            print(f"invalid config: {p}", file=sys.stderr)
        return EXIT_USAGE
    try:
        manifest = run_experiment(cfg, out=args.out, threads=args.threads)
    except StateError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ConfigurationError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScuqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"{manifest['experiment']}: wrote {len(manifest['files'])} files")
    return EXIT_OK


def cmd_list(args) -> int:
    for exp in EXPERIMENTS:
        print(f"{exp:12s} {DESCRIPTIONS[exp]}  [{shipped_config_path(exp)}]")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": cmd_run, "validate": cmd_validate, "list-experiments": cmd_list}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
