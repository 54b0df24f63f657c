"""
Base Geodesic Space Interface

Defines the abstract contract every Hadamard space implementation must satisfy.
All generic code (means, Fréchet approximation, property checks, the
simulation harness) is written against this interface only.

Points may be passed one at a time or as batches. A batch is whatever
`stack` returns: it supports `len()`, integer indexing (giving a point) and
slicing (giving a batch). `distance` and `interpolate` accept batches on
either side and broadcast a single point against a batch, which lets the
Monte-Carlo code fold hundreds of replications in one call.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from config import get_config
from services.errors import DomainError

logger = logging.getLogger(__name__)

Point = Any
Batch = Any
Sampler = Callable[[], Point]


def validate_t(t: float, name: str = "t") -> float:
    """
    Check that a geodesic parameter lies in [0, 1].

    Raises:
        DomainError: If t is outside [0, 1] or not finite
    """
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"Geodesic parameter must lie in [0, 1], got {t}", field=name)
    return t


def validate_weights(weights: Optional[Sequence[float]], n: int, tol: float = 1e-9) -> np.ndarray:
    """
    Validate a probability vector of length n.

    Args:
        weights: Candidate weights; None means uniform
        n: Expected length
        tol: Allowed deviation of the sum from 1

    Returns:
        Weights as a float array

    Raises:
        DomainError: If lengths differ, an entry is negative or the sum is not 1
    """
    if n < 1:
        raise DomainError("At least one point is required", field="points")
    if weights is None:
        return np.full(n, 1.0 / n)

    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.shape[0] != n:
        raise DomainError(f"Expected {n} weights, got shape {w.shape}", field="weights")
    if not np.all(np.isfinite(w)):
        raise DomainError("Weights must be finite", field="weights")
    if np.any(w < 0):
        raise DomainError(f"Weights must be nonnegative, smallest is {w.min()}", field="weights")
    if abs(w.sum() - 1.0) > tol:
        raise DomainError(f"Weights must sum to 1, they sum to {w.sum()}", field="weights")
    return w


class GeodesicSpace(ABC):
    """
    Abstract base class for Hadamard spaces.

    Subclasses provide the metric and the unique minimal geodesic
    x ⊕_t y; everything else here is derived from those two.
    """

    name: str = "abstract"

    def __init__(self, tol_point: Optional[float] = None):
        """
        Args:
            tol_point: Distance below which two points count as equal
        """
        self.tol_point = tol_point if tol_point is not None else get_config().TOL_POINT

    @abstractmethod
    def distance(self, x: Point, y: Point) -> Any:
        """
        Distance between points (elementwise for batches).

        Returns:
            Nonnegative float, or an array of them for batched input
        """
        pass

    @abstractmethod
    def interpolate(self, x: Point, y: Point, t: float) -> Point:
        """
        Point x ⊕_t y on the minimal geodesic from x (t = 0) to y (t = 1).

        Raises:
            DomainError: If t is outside [0, 1]
        """
        pass

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> Point:
        """Draw a random valid point; deterministic given the generator state."""
        pass

    def stack(self, points: Sequence[Point]) -> Batch:
        """
        Turn a sequence of points into a batch.

        Raises:
            DomainError: If the sequence is empty
        """
        points = list(points)
        if not points:
            raise DomainError("Cannot stack an empty point sequence", field="points")
        return np.stack([np.asarray(p, dtype=float) for p in points])

    def concat(self, batches: Sequence[Batch]) -> Batch:
        """Concatenate batches along the batch axis."""
        return np.concatenate(list(batches), axis=0)

    def split(self, batch: Batch, parts: int) -> List[Batch]:
        """Split a batch into `parts` equally sized consecutive batches."""
        return np.split(batch, parts, axis=0)

    def points_equal(self, x: Point, y: Point, tol: Optional[float] = None) -> bool:
        """Tolerance-based point equality: d(x, y) <= tol_point."""
        tol = self.tol_point if tol is None else tol
        return bool(np.all(self.distance(x, y) <= tol))

    def midpoint(self, x: Point, y: Point) -> Point:
        return self.interpolate(x, y, 0.5)

    def diameter(self, points: Sequence[Point], approximate: bool = False) -> float:
        """
        Diameter max_{i,j} d(x_i, x_j) of a finite point set.

        Args:
            points: Point set
            approximate: If True, return 2·max_i d(x_1, x_i), an upper bound
                         within a factor of two, in O(n) distance calls

        Returns:
            Nonnegative float
        """
        n = len(points)
        if n <= 1:
            return 0.0

        batch = self.stack(points)
        if approximate:
            return 2.0 * float(np.max(self.distance(batch[1:], batch[0])))

        diam = 0.0
        for i in range(n - 1):
            row = self.distance(batch[i + 1:], batch[i])
            diam = max(diam, float(np.max(row)))
        return diam
