"""
Mean Trace Model - per-step record of a sequential estimator

A trace keeps (n, estimate, distance to reference) for the steps selected by
the trace policy. When the estimator is fed batches of points (one row per
replication) the estimates are batches and the distances are arrays.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, List, Optional

import numpy as np

from services.errors import DomainError


class EstimatorTag(Enum):
    """Mean constructions known to the harness"""
    INDUCTIVE = "inductive"
    HANSEN = "hansen"
    ES_SAHIB = "es_sahib"
    RESAMPLED = "resampled"
    LIM_PALFIA = "lim_palfia"


@dataclass
class TraceStep:
    n: int
    estimate: Any
    dist_to_reference: Optional[Any] = None


@dataclass
class MeanTrace:
    """
    Sequence of recorded estimator steps.

    Attributes:
        estimator_tag: Which construction produced the trace
        steps: Recorded steps with strictly increasing n
        seed: Seed of the draw sequence, for randomized estimators
    """
    estimator_tag: EstimatorTag
    steps: List[TraceStep] = field(default_factory=list)
    seed: Optional[int] = None

    def record(self, n: int, estimate: Any, dist_to_reference: Optional[Any] = None):
        if self.steps and n <= self.steps[-1].n:
            raise DomainError(
                f"Trace indices must increase: {n} after {self.steps[-1].n}",
                field="n"
            )
        self.steps.append(TraceStep(n=n, estimate=estimate, dist_to_reference=dist_to_reference))

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Any:
        """Estimate at the last recorded step."""
        if not self.steps:
            raise DomainError("Trace is empty", field="steps")
        return self.steps[-1].estimate

    @property
    def indices(self) -> List[int]:
        return [s.n for s in self.steps]

    def at(self, n: int) -> TraceStep:
        for step in self.steps:
            if step.n == n:
                return step
        raise DomainError(f"Step {n} was not recorded", field="n")

    def distances(self) -> np.ndarray:
        """Recorded distances stacked along the first axis."""
        return np.array([s.dist_to_reference for s in self.steps], dtype=float)


def should_record(n: int, stride: int, record_at: Iterable[int] = ()) -> bool:
    """Trace policy: the first ten steps, every stride-th step and any requested step."""
    return n <= 10 or n % stride == 0 or n in record_at
