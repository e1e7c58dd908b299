"""Experiment configuration: strict JSON parsing and resolved echo."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum

from .belief import LAPLACE_ALPHA
from .environment import EnvironmentSpec, make_environment
from .errors import ConfigError, KnowledgeGrowthError

MAX_SEED = 2**64 - 1


class StrategyKind(str, Enum):
    SUBJECTIVE_OPTIMAL = "subjective_optimal"
    ORACLE = "oracle"
    UNIFORM = "uniform"
    GREEDY = "greedy"


@dataclass(frozen=True)
class ExperimentConfig:
    environment: EnvironmentSpec
    t_horizon: int
    alpha: tuple[float, ...] | None = None
    draws_per_stage: int = 1
    k0: float = 1.0
    strategy: StrategyKind = StrategyKind.SUBJECTIVE_OPTIMAL
    seed: int = 0
    output_path: str = "out"
    emit_per_stage: bool = True

    def resolved_alpha(self) -> tuple[float, ...]:
        if self.alpha is None:
            return (LAPLACE_ALPHA,) * self.environment.m
        return self.alpha

    def resolved(self) -> "ExperimentConfig":
        return replace(self, alpha=self.resolved_alpha())


_TOP_FIELDS = {
    "environment", "alpha", "t_horizon", "draws_per_stage", "k0",
    "strategy", "seed", "output_path", "emit_per_stage",
}
_ENV_FIELDS = {"m", "p", "y"}


def _number_list(value, field: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{field}: expected a nonempty list of numbers")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{field}: expected numbers, got {v!r}")
    return [float(v) for v in value]


def _integer(value, field: str, lo: int, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{field}: expected an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        raise ConfigError(f"{field}: {value} out of range")
    return value


def config_from_dict(doc) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    unknown = sorted(set(doc) - _TOP_FIELDS)
    if unknown:
        raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")
    for required in ("environment", "t_horizon"):
        if required not in doc:
            raise ConfigError(f"{required}: missing required field")

    env_doc = doc["environment"]
    if not isinstance(env_doc, dict):
        raise ConfigError("environment: expected an object")
    unknown = sorted(set(env_doc) - _ENV_FIELDS)
    if unknown:
        raise ConfigError(f"environment: unknown field(s) {', '.join(unknown)}")
    for key in ("p", "y"):
        if key not in env_doc:
            raise ConfigError(f"environment.{key}: missing required field")
    p = _number_list(env_doc["p"], "environment.p")
    y = _number_list(env_doc["y"], "environment.y")
    m = _integer(env_doc.get("m", len(p)), "environment.m", 1)
    if len(p) != m:
        raise ConfigError(f"environment.p: expected {m} entries, got {len(p)}")
    if len(y) != m:
        raise ConfigError(f"environment.y: expected {m} entries, got {len(y)}")
    try:
        env = make_environment(m, p, y)
    except KnowledgeGrowthError as exc:
        field = "environment.y" if "value" in str(exc) else "environment.p"
        raise ConfigError(f"{field}: {exc}") from None

    alpha = doc.get("alpha")
    if alpha is not None:
        alpha = _number_list(alpha, "alpha")
        if len(alpha) != m:
            raise ConfigError(f"alpha: expected {m} entries, got {len(alpha)}")
        if any(a <= 0 for a in alpha):
            raise ConfigError("alpha: Carnap widths must be positive")
        alpha = tuple(alpha)

    k0 = doc.get("k0", 1.0)
    if isinstance(k0, bool) or not isinstance(k0, (int, float)) or not k0 > 0:
        raise ConfigError(f"k0: expected a positive number, got {k0!r}")

    try:
        strategy = StrategyKind(doc.get("strategy", StrategyKind.SUBJECTIVE_OPTIMAL.value))
    except ValueError:
        choices = ", ".join(s.value for s in StrategyKind)
        raise ConfigError(f"strategy: expected one of {choices}") from None

    output_path = doc.get("output_path", "out")
    if not isinstance(output_path, str):
        raise ConfigError("output_path: expected a string")
    emit = doc.get("emit_per_stage", True)
    if not isinstance(emit, bool):
        raise ConfigError("emit_per_stage: expected true or false")

    return ExperimentConfig(
        environment=env,
        t_horizon=_integer(doc["t_horizon"], "t_horizon", 1),
        alpha=alpha,
        draws_per_stage=_integer(doc.get("draws_per_stage", 1), "draws_per_stage", 1),
        k0=float(k0),
        strategy=strategy,
        seed=_integer(doc.get("seed", 0), "seed", 0, MAX_SEED),
        output_path=output_path,
        emit_per_stage=emit,
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(doc)


def config_to_dict(config: ExperimentConfig) -> dict:
    """Fully resolved config, including defaulted fields; re-parses to an equal config."""
    env = config.environment
    return {
        "environment": {"m": env.m, "p": env.p.tolist(), "y": env.y.tolist()},
        "alpha": list(config.resolved_alpha()),
        "t_horizon": config.t_horizon,
        "draws_per_stage": config.draws_per_stage,
        "k0": config.k0,
        "strategy": config.strategy.value,
        "seed": config.seed,
        "output_path": config.output_path,
        "emit_per_stage": config.emit_per_stage,
    }
