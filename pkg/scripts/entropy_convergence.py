"""Relative entropy and posterior error over time, across seeded replicates.

Writes a CSV with per-checkpoint quantiles of theta and of the max posterior
error, ready for plotting.

    python scripts/entropy_convergence.py --replicates 32 --horizon 20000 --out theta.csv
"""

import argparse
import csv

import numpy as np

from knowledge_growth import ExperimentConfig, make_environment, run_experiment


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--replicates", type=int, default=32)
    parser.add_argument("--horizon", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="entropy_convergence.csv")
    args = parser.parse_args()

    env = make_environment(5, [0.4, 0.25, 0.15, 0.12, 0.08], [1.0, 1.5, 2.0, 3.0, 5.0])
    checkpoints = np.unique(np.geomspace(1, args.horizon, 40).astype(int)) - 1

    theta, err = [], []
    for j in range(args.replicates):
        traj = run_experiment(ExperimentConfig(env, args.horizon, seed=args.seed + j))
        theta.append(traj.theta[checkpoints])
        err.append(np.max(np.abs(traj.posterior[checkpoints] - env.p), axis=1))
    theta, err = np.array(theta), np.array(err)

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "theta_q10", "theta_median", "theta_q90", "post_err_median"])
        for k, t in enumerate(checkpoints):
            q10, q50, q90 = np.quantile(theta[:, k], [0.1, 0.5, 0.9])
            writer.writerow([int(t), q10, q50, q90, np.median(err[:, k])])
    print(f"wrote {args.out}: median final theta {np.median(theta[:, -1]):.5f}")


if __name__ == "__main__":
    main()
