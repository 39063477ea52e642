#!/usr/bin/env python3
"""Sweep the moment-operator gap over the desk-scale (d, N) grid.

Writes a CSV (default results/haar_gap_grid.csv) with the gap, both bounds,
and the minimum eigenvalue of the scalar-subtracted remainder per cell, plus
a Monte Carlo deviation column when --mc-samples is given.
"""

import argparse
from pathlib import Path

from sqlab.experiments import ExperimentConfig, run_sweep, write_records


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--N", type=int, nargs="+", default=[1, 2, 3, 4])
    parser.add_argument("--mc-samples", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--out", default="results/haar_gap_grid.csv")
    args = parser.parse_args()

    config = ExperimentConfig(
        subcommand="haar-gap",
        d_values=tuple(args.d),
        copies_values=tuple(args.N),
        mc_samples=args.mc_samples,
        seed=args.seed,
        threads=args.threads,
    )
    records = run_sweep(config)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_records(records, "csv", args.out)

    worst_slack = min(
        r.values["bound_two_term"] - r.values["gap"] for r in records if r.error is None
    )
    failures = [r for r in records if r.error]
    print(f"wrote {len(records)} cells to {args.out}")
    print(f"tightest two-term slack: {worst_slack:.6f}")
    if failures:
        print(f"cells with errors: {[(r.params, r.error) for r in failures]}")


if __name__ == "__main__":
    main()
