"""
Euclidean reference space.

The flat case: every mean construction collapses to the arithmetic mean here,
which makes it the oracle space for the whole test surface.
"""

import logging
from typing import Optional

import numpy as np

from services.errors import DomainError
from .space import GeodesicSpace, Point, validate_t

logger = logging.getLogger(__name__)


class EuclideanSpace(GeodesicSpace):
    """R^d with the standard metric. Points are float arrays of shape (..., d)."""

    name = "euclidean"

    def __init__(self, dim: int, tol_point: Optional[float] = None):
        super().__init__(tol_point)
        if dim < 1:
            raise DomainError(f"Dimension must be at least 1, got {dim}", field="dim")
        self.dim = dim

    def _as_points(self, x: Point) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and self.dim == 1:
            x = x.reshape(1)
        if x.shape[-1] != self.dim:
            raise DomainError(
                f"Expected points of dimension {self.dim}, got shape {x.shape}",
                field="point"
            )
        return x

    def stack(self, points) -> np.ndarray:
        points = list(points)
        if not points:
            raise DomainError("Cannot stack an empty point sequence", field="points")
        return np.stack([self._as_points(p) for p in points])

    def distance(self, x: Point, y: Point):
        diff = self._as_points(x) - self._as_points(y)
        d = np.sqrt(np.sum(diff * diff, axis=-1))
        return float(d) if np.ndim(d) == 0 else d

    def interpolate(self, x: Point, y: Point, t: float) -> np.ndarray:
        t = validate_t(t)
        x = self._as_points(x)
        y = self._as_points(y)
        if t == 0.0:
            return np.broadcast_to(x, np.broadcast_shapes(x.shape, y.shape)).copy()
        if t == 1.0:
            return np.broadcast_to(y, np.broadcast_shapes(x.shape, y.shape)).copy()
        return (1.0 - t) * x + t * y

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(size=self.dim)

    def weighted_mean(self, points, weights) -> np.ndarray:
        """Closed-form weighted barycenter Σ w_k x_k."""
        batch = self._as_points(self.stack(points))
        return np.tensordot(np.asarray(weights, dtype=float), batch, axes=(0, 0))
