"""
Bound Parameters Model - inputs of the heteroscedastic law of large numbers bound

Holds the limit μ, the per-step means μ_k, the per-step variances Var(X_k)
and the distances d(μ_k, μ), from which D_n is derived.
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence

import numpy as np

from services.errors import DomainError


@dataclass
class BoundParams:
    """
    Attributes:
        mu: Limit reference point μ
        mu_n: Per-step means μ_1..μ_N (may be left empty when mean_distances is given)
        var_n: Per-step variances Var(X_1)..Var(X_N)
        mean_distances: d(μ_k, μ) for k = 1..N
    """
    mu: Any
    mu_n: List[Any]
    var_n: np.ndarray
    mean_distances: np.ndarray = field(default=None)

    def __post_init__(self):
        self.var_n = np.asarray(self.var_n, dtype=float)
        if self.mean_distances is None:
            raise DomainError("mean_distances are required; use BoundParams.from_points", field="mean_distances")
        self.mean_distances = np.asarray(self.mean_distances, dtype=float)

        if self.var_n.shape != self.mean_distances.shape:
            raise DomainError(
                f"Length mismatch: {self.var_n.shape[0]} variances, {self.mean_distances.shape[0]} means",
                field="var_n"
            )
        if self.mu_n and len(self.mu_n) != self.var_n.shape[0]:
            raise DomainError(f"Length mismatch: {len(self.mu_n)} means, {self.var_n.shape[0]} variances",
                              field="mu_n")
        if np.any(self.var_n < 0):
            raise DomainError("Variances must be nonnegative", field="var_n")

        # running D_k = max_{j<=k} max{d(μ,μ_j), √Var(X_j)}
        self._spread = np.maximum.accumulate(np.maximum(self.mean_distances, np.sqrt(self.var_n)))

    @classmethod
    def from_points(cls, space, mu, mu_n: Sequence[Any], var_n: Sequence[float]) -> 'BoundParams':
        """Build parameters from explicit per-step means in a space."""
        mu_n = list(mu_n)
        if not mu_n:
            raise DomainError("At least one step is required", field="mu_n")
        dist = np.asarray(space.distance(space.stack(mu_n), mu), dtype=float).reshape(len(mu_n))
        return cls(mu=mu, mu_n=mu_n, var_n=np.asarray(var_n, dtype=float), mean_distances=dist)

    def __len__(self):
        return self.var_n.shape[0]

    def max_spread(self, n: int) -> float:
        """D_n."""
        self._check_index(n)
        return float(self._spread[n - 1])

    def _check_index(self, n: int):
        if not 1 <= n <= len(self):
            raise DomainError(f"Index {n} outside 1..{len(self)}", field="n")

    def prefix_sums(self, n: Optional[int] = None):
        """(Σ_{k<=n} d(μ_k,μ), Σ_{k<=n} Var(X_k))."""
        n = len(self) if n is None else n
        self._check_index(n)
        return float(self.mean_distances[:n].sum()), float(self.var_n[:n].sum())
