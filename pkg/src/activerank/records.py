"""Experiment configuration and result records."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .model import InvalidArgumentError

KINDS = ("displacement-sim", "strategy-compare", "dataset-run")
STRATEGIES = ("sorting", "random", "both")
ORACLES = ("bt-model", "empirical-replay", "noiseless")
SCHEMA_VERSION = 1


class ConfigError(InvalidArgumentError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: tuple[int, ...] = (500,)
    lambdas: tuple[float, ...] = (10.0,)
    budgets: tuple[int, ...] = ()
    realizations: int = 20
    seed: int = 0
    strategy: str = "both"
    estimator: str = "arc-ml"
    oracle: str = "bt-model"
    input: str | None = None
    input_format: str | None = None
    output: str | None = None
    # Applied to the ground-truth fit of dataset runs and to `fit`.
    pseudo_count: float = 0.0
    # Applied to every per-budget fit; sparse logs routinely contain unbeaten items.
    budget_pseudo_count: float = 0.01

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "budgets", tuple(int(x) for x in self.budgets))

    def validate(self) -> ExperimentConfig:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.realizations < 1:
            raise ConfigError("realizations must be positive")
        if any(x < 1 for x in self.n):
            raise ConfigError("n must be positive")
        if any(not lam > 0 for lam in self.lambdas):
            raise ConfigError("lambda must be positive")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.oracle not in ORACLES:
            raise ConfigError(f"unknown oracle {self.oracle!r}")
        if self.pseudo_count < 0 or self.budget_pseudo_count < 0:
            raise ConfigError("pseudo-counts must be non-negative")
        if self.kind == "displacement-sim":
            if len(self.n) > 1 and len(self.lambdas) > 1:
                raise ConfigError("sweep either n or lambda, not both")
            if any(x < 2 for x in self.n):
                raise ConfigError("displacement simulation needs n >= 2")
        else:
            if not self.budgets:
                raise ConfigError("budget schedule is empty")
            if any(b < 1 for b in self.budgets):
                raise ConfigError("budgets must be positive")
            if any(b2 <= b1 for b1, b2 in zip(self.budgets, self.budgets[1:])):
                raise ConfigError("budget schedule must be strictly increasing")
        if self.kind == "strategy-compare":
            if len(self.n) != 1 or len(self.lambdas) != 1:
                raise ConfigError("strategy comparison takes a single n and lambda")
            if self.n[0] < 2:
                raise ConfigError("strategy comparison needs n >= 2")
        if self.kind == "dataset-run" and not self.input:
            raise ConfigError("dataset run requires an input file")
        return self

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("n", "lambdas", "budgets"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        return cls(**d)


@dataclass
class ExperimentResult:
    """Aggregated and per-realization metric series.

    ``axis`` names the x-axis of every series (``budget`` for sampling
    experiments, ``lambda`` or ``n`` for displacement sweeps); ``metrics``
    maps a series name to ``{"mean": [...], "std": [...], "count": [...]}``
    parallel to ``axis["values"]``.
    """

    config: ExperimentConfig
    axis: dict[str, Any]
    metrics: dict[str, dict[str, list]]
    realizations: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.config.kind,
            "config": self.config.to_dict(),
            "seed": self.config.seed,
            "estimator": self.config.estimator,
            "strategy": self.config.strategy,
            "budgets": list(self.config.budgets),
            "axis": _clean(self.axis),
            "metrics": _clean(self.metrics),
            "realizations": _clean(self.realizations),
            "metadata": _clean(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentResult:
        config = ExperimentConfig.from_dict(d["config"])
        if d["seed"] != config.seed:
            raise ConfigError("top-level seed disagrees with config seed")
        return cls(config, d["axis"], d["metrics"], d["realizations"], d.get("metadata", {}))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExperimentResult):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _clean(obj: Any) -> Any:
    """Convert numpy scalars to Python and non-finite floats to ``None`` for JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj
