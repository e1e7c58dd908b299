"""Cumulative regret of each strategy against the oracle, in true expected growth.

    python scripts/regret_curves.py --replicates 16 --horizon 20000 --out regret.csv
"""

import argparse
import csv

import numpy as np

from knowledge_growth import ExperimentConfig, StrategyKind, make_environment, run_experiment


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--replicates", type=int, default=16)
    parser.add_argument("--horizon", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--every", type=int, default=100, help="output stride in stages")
    parser.add_argument("--out", default="regret_curves.csv")
    args = parser.parse_args()

    env = make_environment(3, [0.5, 0.3, 0.2], [2.0, 3.0, 6.0])
    others = [s for s in StrategyKind if s is not StrategyKind.ORACLE]
    regret = {s: [] for s in others}
    for j in range(args.replicates):
        seed = args.seed + j
        best = run_experiment(ExperimentConfig(env, args.horizon, seed=seed, strategy=StrategyKind.ORACLE))
        for s in others:
            traj = run_experiment(ExperimentConfig(env, args.horizon, seed=seed, strategy=s))
            regret[s].append(np.cumsum(best.true_value - traj.true_value))

    stages = np.arange(args.every - 1, args.horizon, args.every)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage"] + [f"{s.value}_mean" for s in others])
        for t in stages:
            writer.writerow([int(t)] + [float(np.mean([r[t] for r in regret[s]])) for s in others])
    for s in others:
        print(f"{s.value:>20}: mean final regret {np.mean([r[-1] for r in regret[s]]):.4f} nats")


if __name__ == "__main__":
    main()
