"""
Lim–Palfia Result Model - estimate of the cyclic inductive scheme and its certificate
"""

import math
from dataclasses import dataclass, field
from typing import Any, List, Tuple


@dataclass
class LpResult:
    """
    Attributes:
        estimate: LP^(k) after k inductive steps
        n_points: Number of distinct input points
        cycles_used: Total number of inductive steps k
        diameter: Diameter Δ of the input set (or its 2-approximation)
        error_trace: Optional (step, distance to a reference) pairs recorded along the run
    """
    estimate: Any
    n_points: int
    cycles_used: int
    diameter: float
    error_trace: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def error_certificate(self) -> float:
        """2Δ√(n/k), an upper bound on the distance to the barycenter."""
        return 2.0 * self.diameter * math.sqrt(self.n_points / self.cycles_used)
