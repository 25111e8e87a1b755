#!/usr/bin/env python3
"""Bounds atlas: the exact stationary lower bound across dimensions, with
the Monte Carlo estimators laid alongside it.

Prints the per-dimension table (exact bound, mean-norm statistic, sliced
and small-n assignment estimates), both growth fits, and the (2-alpha)
window constants of the d=1 bound.

    python3 scripts/run_bounds_atlas.py --seed 1 --alpha 1.9
    python3 scripts/run_bounds_atlas.py --dims 1,2,4,8,16 --samples 200000
"""
import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from stablegap import (
    DEFAULT_D_GRID,
    ExperimentConfig,
    gammalower_check,
    run_dim_sweep,
)


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--alpha", type=float, default=1.9)
    p.add_argument("--dims", default=",".join(str(d) for d in DEFAULT_D_GRID))
    p.add_argument("--samples", type=int, default=1_000_000,
                   help="mean-norm cloud size (sliced and assignment subsample)")
    p.add_argument("--out", help="write the table as CSV here")
    return p.parse_args()


def main():
    args = parse_args()
    dims = tuple(int(d) for d in args.dims.split(","))
    cfg = ExperimentConfig(experiment="dim_sweep", seed=args.seed,
                           alpha_grid=(args.alpha,), d_grid=dims,
                           n_samples=args.samples, output_path=args.out)
    res = run_dim_sweep(cfg)

    print(f"alpha = {args.alpha}, config {res.config_hash}")
    print(f"{'d':>4} {'exact lower':>12} {'mean-norm':>12} {'+/-':>9} "
          f"{'sliced':>12} {'assign(2048)':>13}")
    for i, d in enumerate(res.dims):
        print(f"{d:>4d} {res.lower_exact[i]:>12.6f} {res.mean_norm[i]:>12.6f} "
              f"{res.mean_norm_se[i]:>9.1e} {res.sliced[i]:>12.6f} "
              f"{res.assignment_small_n[i]:>13.6f}")
    print(f"growth of the exact bound: slope {res.fit_vs_d.slope:.3f} vs log d "
          f"(r^2 {res.fit_vs_d.r_squared:.4f}), "
          f"{res.fit_vs_dlogd.slope:.3f} vs log(d log(1+d))")
    print(res.note)

    c1, c2 = gammalower_check(np.linspace(1.5, 1.99, 50))
    print(f"d=1 bound over (2-alpha): ratio stays within [{c1:.4f}, {c2:.4f}] "
          "on alpha in [1.5, 1.99]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
