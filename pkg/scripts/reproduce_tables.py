#!/usr/bin/env python
"""Run every published table configuration and write one CSV per row.

    python scripts/reproduce_tables.py --out-dir results --reps-scale 0.2
"""
from __future__ import annotations

import argparse
from pathlib import Path

from nlagg.experiment import ExperimentConfig, emit_sweep, emit_table, run_experiment, thm2_sweep

TABLE1 = [(400, 300), (600, 400), (800, 600), (1000, 700)]
TABLE2 = [(400, 300), (600, 400), (800, 500), (1000, 700)]
FUNCTIONAL = [(30, 20), (50, 30)]


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", type=Path, default=Path("results"))
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--reps-scale", type=float, default=1.0,
                   help="fraction of the published repetition counts (500 / 200)")
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [("highdim-fixed", n, k) for n, k in TABLE1]
    jobs += [("highdim-random", n, k) for n, k in TABLE2]
    jobs += [(s, n, k) for s in ("functional-I", "functional-II") for n, k in FUNCTIONAL]
    for scenario, n, k in jobs:
        base = ExperimentConfig.for_scenario(scenario)
        reps = max(1, round(base.reps * args.reps_scale))
        cfg = ExperimentConfig.for_scenario(scenario, n=n, k=k, reps=reps, seed=args.seed)
        out = args.out_dir / f"{scenario}_n{n}_k{k}.csv"
        emit_table(run_experiment(cfg, args.threads), "csv", out)
        print(f"wrote {out}")

    cfg = ExperimentConfig.for_scenario("thm2-sweep", seed=args.seed)
    out = args.out_dir / "thm2_sweep.csv"
    emit_sweep(thm2_sweep(cfg), "csv", out)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
