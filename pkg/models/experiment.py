"""
Experiment Model - contamination specs, experiment configurations and run results

ExperimentConfig mirrors the flat key = value experiment file; to_text()
writes that format back (the config echo) and services.config_file parses it.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import get_config
from services.errors import DomainError
from .trace import EstimatorTag


class ExperimentKind(Enum):
    SPD_DIAGONAL = "spd_diagonal"
    OPEN_BOOK = "open_book"


class NoiseKind(Enum):
    """How a contaminated index is replaced"""
    FIXED_POINT = "fixed_point"     # substitute one fixed point
    RANDOM_SHEET = "random_sheet"   # fixed (t, spine) on a uniformly random sheet


class Metric(Enum):
    INTRINSIC = "intrinsic"
    SPECTRAL = "spectral"


DEFAULT_ESTIMATORS = (EstimatorTag.INDUCTIVE, EstimatorTag.HANSEN, EstimatorTag.RESAMPLED)

# Contamination grids of the two simulation studies
SPD_EPSILONS = (0.0, 0.02, 0.05, 0.10)
BOOK_EPSILONS = (0.0, 0.02, 0.30, 0.35)


@dataclass(frozen=True)
class ContaminationSpec:
    """
    Huber ε-contamination of a sequence.

    Attributes:
        epsilon: Replacement probability per index, in [0, 1]
        noise_kind: Fixed point or random sheet
        noise: For FIXED_POINT the substituted point; for RANDOM_SHEET the
               (t, spine...) template placed on a random sheet
        seed: Seed of the Bernoulli and sheet draws
        sheets: Number of sheets to draw from (RANDOM_SHEET only)
    """
    epsilon: float
    noise_kind: NoiseKind
    noise: Any
    seed: int = 0
    sheets: int = 3

    def __post_init__(self):
        if not 0.0 <= float(self.epsilon) <= 1.0:
            raise DomainError(f"epsilon must lie in [0, 1], got {self.epsilon}", field="epsilon")
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed}", field="seed")
        if self.noise_kind is NoiseKind.RANDOM_SHEET and self.sheets < 2:
            raise DomainError(f"Need at least 2 sheets, got {self.sheets}", field="sheets")

    def with_seed(self, seed: int) -> 'ContaminationSpec':
        return replace(self, seed=seed)


def default_noise(experiment: ExperimentKind) -> Tuple[NoiseKind, Any]:
    """Noise of the simulation studies: B = 5I, or ((1, 10), random sheet)."""
    if experiment is ExperimentKind.SPD_DIAGONAL:
        return NoiseKind.FIXED_POINT, 5.0 * np.eye(2)
    return NoiseKind.RANDOM_SHEET, (1.0, 10.0)


def _fmt(value: float) -> str:
    return repr(float(value))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Full description of one contamination experiment.

    Attributes:
        experiment: Which generator to run
        n_max: Sequence length
        contamination: Contamination spec (its seed is ignored per replication)
        estimators: Estimators to trace
        lp_budget_exponent: Lim–Palfia budget k = n·⌈n^(e−1)⌉
        replications: Number of independent replications
        base_seed: Root of every replication seed
        trace_stride: Record every stride-th step after the first ten
    """
    experiment: ExperimentKind
    n_max: int
    contamination: ContaminationSpec
    estimators: Tuple[EstimatorTag, ...] = DEFAULT_ESTIMATORS
    lp_budget_exponent: float = 2.0
    replications: int = 1
    base_seed: int = 0
    trace_stride: int = 50

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError(f"n_max must be at least 1, got {self.n_max}", field="n_max")
        if self.replications < 1:
            raise DomainError(f"replications must be at least 1, got {self.replications}", field="replications")
        if self.trace_stride < 1:
            raise DomainError(f"trace_stride must be at least 1, got {self.trace_stride}", field="trace_stride")
        if self.lp_budget_exponent < 1:
            raise DomainError(
                f"lp_budget_exponent must be at least 1, got {self.lp_budget_exponent}",
                field="lp_budget_exponent"
            )
        if self.base_seed < 0:
            raise DomainError(f"base_seed must be nonnegative, got {self.base_seed}", field="base_seed")
        if not self.estimators:
            raise DomainError("At least one estimator is required", field="estimators")

    @classmethod
    def create(
        cls,
        experiment,
        n_max: Optional[int] = None,
        epsilon: float = 0.0,
        estimators: Optional[Sequence] = None,
        lp_budget_exponent: float = 2.0,
        replications: Optional[int] = None,
        base_seed: int = 0,
        trace_stride: Optional[int] = None,
        noise: Any = None,
    ) -> 'ExperimentConfig':
        """Build a config, filling unspecified values from the active Config."""
        cfg = get_config()
        try:
            kind = ExperimentKind(experiment)
        except ValueError:
            raise DomainError(f"Unknown experiment '{experiment}'", field="experiment")

        noise_kind, default = default_noise(kind)
        if noise is None:
            noise = default
        noise = np.asarray(noise, dtype=float) if noise_kind is NoiseKind.FIXED_POINT else tuple(float(v) for v in noise)

        tags = DEFAULT_ESTIMATORS if estimators is None else tuple(parse_estimators(estimators))
        return cls(
            experiment=kind,
            n_max=cfg.DEFAULT_N_MAX if n_max is None else int(n_max),
            contamination=ContaminationSpec(epsilon=float(epsilon), noise_kind=noise_kind,
                                            noise=noise, seed=base_seed),
            estimators=tags,
            lp_budget_exponent=float(lp_budget_exponent),
            replications=cfg.DEFAULT_REPLICATIONS if replications is None else int(replications),
            base_seed=int(base_seed),
            trace_stride=cfg.DEFAULT_TRACE_STRIDE if trace_stride is None else int(trace_stride),
        )

    @property
    def epsilon(self) -> float:
        return self.contamination.epsilon

    def to_dict(self) -> Dict[str, str]:
        """Flat string values keyed like the experiment file."""
        noise = np.asarray(self.contamination.noise, dtype=float).ravel()
        return {
            'experiment': self.experiment.value,
            'n_max': str(self.n_max),
            'epsilon': _fmt(self.epsilon),
            'noise': " ".join(_fmt(v) for v in noise),
            'estimators': ",".join(tag.value for tag in self.estimators),
            'lp_budget_exponent': _fmt(self.lp_budget_exponent),
            'replications': str(self.replications),
            'base_seed': str(self.base_seed),
            'trace_stride': str(self.trace_stride),
        }

    def to_text(self) -> str:
        """Config echo in the experiment file format."""
        lines = ["# experiment configuration"]
        lines += [f"{key} = {value}" for key, value in self.to_dict().items()]
        return "\n".join(lines) + "\n"

    def same_as(self, other: 'ExperimentConfig') -> bool:
        """Equality that compares array-valued noise by value."""
        return self.to_dict() == other.to_dict()


def parse_estimators(values) -> List[EstimatorTag]:
    if isinstance(values, str):
        values = [v for v in values.split(",")]
    tags = []
    for value in values:
        if isinstance(value, EstimatorTag):
            tags.append(value)
            continue
        name = str(value).strip().replace("-", "_")
        try:
            tags.append(EstimatorTag(name))
        except ValueError:
            raise DomainError(f"Unknown estimator '{value}'", field="estimators")
    return tags


def study_presets(n_max: Optional[int] = None, replications: Optional[int] = None,
                  base_seed: int = 0) -> List[ExperimentConfig]:
    """Configs for every contamination level of both simulation studies."""
    presets = []
    for eps in SPD_EPSILONS:
        presets.append(ExperimentConfig.create(
            ExperimentKind.SPD_DIAGONAL, n_max=n_max, epsilon=eps,
            replications=replications, base_seed=base_seed
        ))
    for eps in BOOK_EPSILONS:
        presets.append(ExperimentConfig.create(
            ExperimentKind.OPEN_BOOK, n_max=n_max, epsilon=eps,
            replications=replications, base_seed=base_seed
        ))
    return presets


@dataclass(frozen=True)
class RunRow:
    experiment: str
    estimator: str
    replication: int
    n: int
    metric: str
    value: float

    @property
    def sort_key(self):
        return (self.estimator, self.replication, self.n, self.metric)


@dataclass
class RunResult:
    """Rows of one experiment plus the configuration that produced them."""
    config_echo: ExperimentConfig
    rows: List[RunRow] = field(default_factory=list)

    def sort(self):
        self.rows.sort(key=lambda r: r.sort_key)
        return self

    def select(self, estimator: Optional[str] = None, metric: Optional[str] = None,
               n: Optional[int] = None) -> List[RunRow]:
        return [
            r for r in self.rows
            if (estimator is None or r.estimator == estimator)
            and (metric is None or r.metric == metric)
            and (n is None or r.n == n)
        ]

    def values(self, estimator: str, metric: str, n: int) -> np.ndarray:
        """Values of one (estimator, metric, n) cell across replications."""
        return np.array([r.value for r in self.select(estimator, metric, n)], dtype=float)
