#!/usr/bin/env python3
"""Fit the minimal-copies curve N(d) for the sign-flip discrimination task.

The closed-form trace norm forces N to grow linearly in d = 2^n, i.e.
exponentially in the qubit count; this script sweeps d, fits N = alpha*d +
beta, and prints the fit alongside the per-d values.
"""

import argparse
from pathlib import Path

from sqlab.experiments import ExperimentConfig, linear_fit, run_sweep, write_records
from sqlab.quantum_sim import HELSTROM_SCHATTEN_THRESHOLD


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=int, nargs="+", default=[64 << k for k in range(7)])
    parser.add_argument("--threshold", type=float, default=HELSTROM_SCHATTEN_THRESHOLD)
    parser.add_argument("--out", default="results/copies_scaling.csv")
    args = parser.parse_args()

    config = ExperimentConfig(
        subcommand="copies-sweep", d_values=tuple(args.d), threshold=args.threshold
    )
    records = run_sweep(config)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_records(records, "csv", args.out)

    good = [r for r in records if r.error is None]
    dims = [r.params["d"] for r in good]
    copies = [r.values["min_copies"] for r in good]
    slope, intercept, r_squared = linear_fit(dims, copies)
    print(f"wrote {len(records)} rows to {args.out}")
    for d, n_min in zip(dims, copies):
        print(f"  d={d:>5}  min copies={n_min}")
    print(f"fit: N = {slope:.6f} * d + {intercept:.3f}   (R^2 = {r_squared:.6f})")


if __name__ == "__main__":
    main()
