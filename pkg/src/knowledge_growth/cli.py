"""Command line entry point: ``run``, ``compare`` and ``verify``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import MAX_SEED, ExperimentConfig, StrategyKind, config_to_dict, parse_config
from .dynamics import Trajectory, run_experiment
from .errors import ConfigError
from .verification import verify

STAGE_SCALARS = (
    "stage_value", "true_expected_value", "f_cumulative", "h_hat_full",
    "h_hat_active", "theta", "capacity", "order",
)
COMPARE_COLUMNS = (
    "strategy", "replicates", "g_star_mean", "g_star_std", "true_growth_mean",
    "true_growth_std", "theta_mean", "theta_std",
)


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return format(float(x), ".17g")


def stage_header(m: int) -> list[str]:
    return (
        ["stage"]
        + [f"n_{i}" for i in range(m)]
        + [f"posterior_{i}" for i in range(m)]
        + [f"r_{i}" for i in range(m)]
        + ["active"]
        + list(STAGE_SCALARS)
    )


def write_stage_table(traj: Trajectory, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(stage_header(traj.draws.shape[1]))
    scalars = (
        traj.stage_value, traj.true_value, traj.f_cumulative, traj.h_hat_full,
        traj.h_hat_active, traj.theta, traj.capacity, traj.order,
    )
    for t in range(traj.t_horizon):
        writer.writerow(
            [t]
            + traj.draws[t].tolist()
            + [fmt(v) for v in traj.posterior[t]]
            + [fmt(v) for v in traj.r[t]]
            + ["".join("1" if a else "0" for a in traj.active[t])]
            + [fmt(col[t]) for col in scalars]
        )


def summarize(traj: Trajectory) -> dict:
    return {
        "t_horizon": traj.t_horizon,
        "ln_k0": traj.ln_k0,
        "f_final": float(traj.f_cumulative[-1]),
        "g_star_avg": traj.g_star_avg,
        "true_growth_avg": float(np.mean(traj.true_value)),
        "theta_final": float(traj.theta[-1]),
        "posterior_final": traj.final_belief().posterior().tolist(),
        "r_final": traj.r[-1].tolist(),
    }


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config(text)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        changes["output_path"] = args.out
    if getattr(args, "per_stage", None) is not None:
        changes["emit_per_stage"] = args.per_stage
    return replace(config, **changes)


def cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args).resolved()
    traj = run_experiment(config)
    out = Path(config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    if config.emit_per_stage:
        with open(out / "stages.csv", "w", newline="") as handle:
            write_stage_table(traj, handle)
    resolved = config_to_dict(config)
    (out / "summary.json").write_text(_dumps({"config": resolved, "summary": summarize(traj)}))
    sys.stdout.write(_dumps(resolved))
    return 0


def run_comparison(
    config: ExperimentConfig,
    strategies: list[StrategyKind],
    replicates: int,
    seed_base: int,
    jobs: int = 1,
) -> list[dict]:
    """Per-run summaries ordered by (strategy, replicate) whatever the completion order."""
    tasks = [
        (si, j, replace(config, strategy=s, seed=seed_base + j))
        for si, s in enumerate(strategies)
        for j in range(replicates)
    ]

    def one(task):
        si, j, cfg = task
        traj = run_experiment(cfg)
        return (si, j), {
            "strategy": cfg.strategy.value,
            "replicate": j,
            "seed": cfg.seed,
            "g_star": traj.g_star_avg,
            "true_growth": float(np.mean(traj.true_value)),
            "theta": float(traj.theta[-1]),
        }

    if jobs <= 1:
        results = [one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = [f.result() for f in as_completed([pool.submit(one, t) for t in tasks])]
    return [row for _, row in sorted(results, key=lambda item: item[0])]


def comparison_table(runs: list[dict], strategies: list[StrategyKind]) -> list[dict]:
    table = []
    for s in strategies:
        rows = [r for r in runs if r["strategy"] == s.value]
        entry = {"strategy": s.value, "replicates": len(rows)}
        for key, col in (("g_star", "g_star"), ("true_growth", "true_growth"), ("theta", "theta")):
            values = np.array([r[col] for r in rows])
            entry[f"{key}_mean"] = float(values.mean())
            entry[f"{key}_std"] = float(values.std())
        table.append(entry)
    return table


def _table_csv(table: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_COLUMNS)
    for entry in table:
        writer.writerow([entry[c] if c in ("strategy", "replicates") else fmt(entry[c]) for c in COMPARE_COLUMNS])
    return buf.getvalue()


def _parse_strategies(text: str) -> list[StrategyKind]:
    try:
        return [StrategyKind(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"--strategies: {exc}") from None


def cmd_compare(args) -> int:
    config = load_config(args.config).resolved()
    strategies = _parse_strategies(args.strategies)
    if not strategies:
        raise UsageError("--strategies: at least one strategy is required")
    if args.replicates < 1:
        raise UsageError("--replicates must be at least 1")
    seed_base = config.seed if args.seed is None else args.seed
    if seed_base + args.replicates - 1 > MAX_SEED:
        raise UsageError("--seed: replicate seeds overflow 64 bits")
    runs = run_comparison(config, strategies, args.replicates, seed_base, args.jobs)
    text = _table_csv(comparison_table(runs, strategies))
    if args.out is not None:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    if args.instances < 0 or args.grid < 1 or args.tol < 0:
        raise UsageError("--instances >= 0, --grid >= 1 and --tol >= 0 are required")
    if args.m_max < 2:
        raise UsageError("--m-max must be at least 2")
    report = verify(args.instances, args.m_max, args.grid, args.tol, args.seed)
    print(f"instances: {len(report.checks)}  failed: {len(report.failures)}  tol: {args.tol}")
    for key, value in report.worst().items():
        print(f"  worst {key}: {value:.3e}")
    for check in report.failures:
        print("FAIL " + json.dumps({"p": check.p.tolist(), "y": check.y.tolist(), "gap": check.gap,
                                     "kkt": check.kkt, "identity": check.identity}))
    print("PASS" if report.ok else "FAIL")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knowledge-growth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=_parse_seed)
    run.add_argument("--out")
    run.add_argument("--per-stage", dest="per_stage", type=_parse_bool)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="compare strategies over seeded replicates")
    cmp_.add_argument("--config", required=True)
    cmp_.add_argument("--strategies", default=",".join(s.value for s in StrategyKind))
    cmp_.add_argument("--replicates", type=int, default=8)
    cmp_.add_argument("--seed", type=_parse_seed, help="base seed; replicate j uses base + j")
    cmp_.add_argument("--out")
    cmp_.add_argument("--jobs", type=int, default=1)
    cmp_.set_defaults(func=cmd_compare)

    ver = sub.add_parser("verify", help="fuzz the solver against the lattice oracle")
    ver.add_argument("--instances", type=int, default=200)
    ver.add_argument("--m-max", dest="m_max", type=int, default=4)
    ver.add_argument("--grid", type=int, default=300)
    ver.add_argument("--tol", type=float, default=5e-3)
    ver.add_argument("--seed", type=_parse_seed, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
