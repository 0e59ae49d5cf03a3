#!/usr/bin/env python3
"""Run the noisy-copy simulated experiment for one loss level and print the
witness trajectory over the sample budget.

Usage: python scripts/simulated_experiment.py [--tau 0.75] [--repetitions 500]
       [--seed 42]
"""

import argparse
import math
import sys

from ptmoments.estimation import SamplingPlan, full_simulation
from ptmoments.states import LossyNOONParams


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tau", type=float, default=0.75)
    parser.add_argument("--repetitions", type=int, default=500)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    params = LossyNOONParams.balanced(1, args.tau)
    plan = SamplingPlan(k=2, repetitions=args.repetitions, master_seed=args.seed)
    print(f"tau={args.tau}  repetitions={args.repetitions}  seed={args.seed}")
    print(f"{'k':>6} {'mean':>10} {'std':>9} {'analytic':>10} {'band':>21}")
    for pt in full_simulation(params, plan):
        est = pt.estimate
        std = math.sqrt(est.variance)
        print(f"{pt.k:>6} {est.mean:>10.4f} {std:>9.4f} {pt.analytic_witness:>10.4f} "
              f"[{pt.band_low:>9.4f}, {pt.band_high:>8.4f}]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
