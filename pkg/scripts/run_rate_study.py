#!/usr/bin/env python3
"""Rate study: how fast does the stationary W1 gap close as alpha -> 2?

Runs the alpha sweep at full sample budget, prints both log-log fits, and
optionally repeats over several seeds to show the spread of the fitted
exponent.  Writes per-seed CSVs next to --out when given.

    python3 scripts/run_rate_study.py --seed 1
    python3 scripts/run_rate_study.py --seeds 1,2,3 --quick --out rates.csv
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from stablegap import ExperimentConfig, ou_w1_lower_exact, run_alpha_sweep


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--seeds", help="comma list; overrides --seed")
    p.add_argument("--samples", type=int, default=None,
                   help="per-cloud sample count (default: full budget)")
    p.add_argument("--quick", action="store_true",
                   help="1e6 samples per cloud; floor-limited but fast")
    p.add_argument("--bootstrap", type=int, default=20)
    p.add_argument("--out", help="CSV basename; seed is appended per run")
    return p.parse_args()


def main():
    args = parse_args()
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [args.seed]
    n = 1_000_000 if args.quick else args.samples

    rows = []
    for seed in seeds:
        out = None
        if args.out:
            stem, ext = os.path.splitext(args.out)
            out = f"{stem}.seed{seed}{ext or '.csv'}"
        cfg = ExperimentConfig(experiment="alpha_sweep", seed=seed,
                               n_samples=n, n_bootstrap=args.bootstrap,
                               output_path=out)
        res = run_alpha_sweep(cfg)
        print(f"seed {seed}  (config {res.config_hash})")
        for a, v, s in zip(res.alphas, res.w1, res.stderr):
            lower = ou_w1_lower_exact(1, a) if a < 2 else 0.0
            print(f"  alpha {a:.5f}  W1 {v:.6e} +/- {s:.1e}   exact lower {lower:.6e}")
        f1, f2 = res.fit_log_2ma, res.fit_log_2ma_loglog
        print(f"  slope vs log(2-a):            {f1.slope:+.4f}  r^2 {f1.r_squared:.4f}")
        print(f"  slope vs log((2-a)log 1/(2-a)): {f2.slope:+.4f}  r^2 {f2.r_squared:.4f}")
        rows.append((seed, f1.slope, f2.slope))

    if len(rows) > 1:
        print("\nslope spread over seeds:")
        for seed, s1, s2 in rows:
            print(f"  seed {seed:<4d} {s1:+.4f}  {s2:+.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
