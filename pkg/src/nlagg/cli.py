"""Command line entry point: one subcommand per scenario.

Exit codes: 0 success, 2 configuration error, 3 runtime or numeric error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .core import ConfigurationError
from .experiment import (SCENARIOS, CV_GRID, ExperimentConfig, emit_sweep, emit_table,
                         oracle_bridge, run_experiment, thm2_sweep)
from .knn import EnsembleSpec
from .smoothing import SmootherSpec

log = logging.getLogger("nlagg")


def parse_alpha(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}")


def parse_neighbors(text: str) -> EnsembleSpec:
    """``5,7,9`` (fixed list), ``random:M`` or ``cv``."""
    try:
        if text == "cv":
            return EnsembleSpec("cv-single", CV_GRID)
        if text.startswith("random:"):
            return EnsembleSpec("random-odd", M=int(text.split(":", 1)[1]))
        return EnsembleSpec("fixed-list", tuple(int(v) for v in text.split(",")))
    except (ValueError, ConfigurationError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlagg", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        s = sub.add_parser(name)
        s.add_argument("--n", type=int)
        s.add_argument("--k", type=int)
        s.add_argument("--alpha", type=parse_alpha, action="append",
                       help="repeatable; accepts fractions such as 1/4")
        s.add_argument("--reps", type=int)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--test-size", type=int)
        s.add_argument("--neighbors", type=parse_neighbors)
        s.add_argument("--dim", type=int)
        s.add_argument("--shift", type=float, help="translation of the class-0 cube")
        s.add_argument("--h1", type=float)
        s.add_argument("--h2", type=float)
        s.add_argument("--cv-bandwidths", action="store_true")
        s.add_argument("--theta-form", choices=["exp", "inverse-square"])
        s.add_argument("--l", dest="l_values", type=int, action="append",
                       help="pool size (sweeps); repeatable")
        s.add_argument("--out")
        s.add_argument("--format", choices=["csv", "text"], default="csv")
        s.add_argument("--threads", type=int, default=1)
    return p


def config_from_args(args) -> ExperimentConfig:
    smoother = None
    if args.scenario == "functional-II":
        d = SmootherSpec()
        smoother = SmootherSpec(args.h1 if args.h1 is not None else d.h1,
                                args.h2 if args.h2 is not None else d.h2)
    return ExperimentConfig.for_scenario(
        args.scenario, n=args.n, k=args.k,
        alphas=tuple(args.alpha) if args.alpha else None,
        reps=args.reps, seed=args.seed, test_size=args.test_size,
        ensemble=args.neighbors, smoother=smoother,
        cv_bandwidths=args.cv_bandwidths or None, theta_form=args.theta_form,
        dim=args.dim, shift=args.shift,
        l_values=tuple(args.l_values) if args.l_values else None)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigurationError("--threads must be >= 1")
        cfg = config_from_args(args)
        if cfg.scenario == "thm2-sweep":
            text = emit_sweep(thm2_sweep(cfg), args.format, args.out)
        elif cfg.scenario == "oracle-bridge":
            text = emit_sweep(oracle_bridge(cfg), args.format, args.out)
        else:
            text = emit_table(run_experiment(cfg, args.threads), args.format, args.out)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    if args.out is None:
        sys.stdout.write(text)
        if args.format == "csv":
            sys.stdout.write(cfg.manifest() + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
