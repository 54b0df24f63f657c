"""
Fréchet mean (barycenter) approximation and exact oracles.

The Lim–Palfia scheme runs the inductive mean over the data repeated
cyclically. It is an infinite iteration; here the caller fixes the step
budget k and gets back the certificate 2Δ√(n/k) on the distance to the
true barycenter.
"""

import logging
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from models.book_point import BookPoint
from models.lp_result import LpResult
from services.errors import DomainError
from services.geometry.open_book import BookSpace, book_frechet
from services.geometry.space import GeodesicSpace, Point, validate_weights
from services.geometry.spd import commuting_barycenter

logger = logging.getLogger(__name__)


class OracleSpace(Enum):
    """Spaces with a closed-form barycenter"""
    EUCLIDEAN = "euclidean"
    SPD_COMMUTING = "spd_commuting"
    OPEN_BOOK = "open_book"


def weighted_schedule(weights: np.ndarray, total_steps: int) -> np.ndarray:
    """
    Deterministic largest-remainder order of point indices.

    At step m the index maximizing w_i·m − (times i was used) is taken, ties
    going to the lowest index, so after any number of steps each count
    stays close to its share. Uniform weights give the plain cycle.
    """
    counts = np.zeros(weights.shape[0])
    order = np.empty(total_steps, dtype=int)
    for m in range(1, total_steps + 1):
        i = int(np.argmax(weights * m - counts))
        order[m - 1] = i
        counts[i] += 1
    return order


def lim_palfia(
    space: GeodesicSpace,
    points: Sequence[Point],
    weights: Optional[Sequence[float]] = None,
    total_steps: Optional[int] = None,
    reference: Optional[Point] = None,
    record_every: Optional[int] = None,
    approximate_diameter: bool = False,
) -> LpResult:
    """
    Lim–Palfia cyclic inductive scheme LP^(k).

    LP^(1) = y_1 and LP^(m) = LP^(m−1) ⊕_{1/m} y_m, where y cycles through
    the points (in largest-remainder order when weights are given).

    Args:
        space: Geodesic space of the points
        points: Nonempty list
        weights: Probability vector, uniform when None
        total_steps: Budget k >= n (default n²)
        reference: Point to measure the error trace against
        record_every: Record (m, d(LP^(m), reference)) every this many steps
        approximate_diameter: Use the O(n) 2-approximation of Δ

    Returns:
        LpResult with the estimate and the certificate inputs

    Raises:
        DomainError: If points is empty, k < n or weights are invalid
    """
    points = list(points)
    n = len(points)
    if n == 0:
        raise DomainError("lim_palfia needs at least one point", field="points")
    k = n * n if total_steps is None else int(total_steps)
    if k < n:
        raise DomainError(f"Step budget k={k} is smaller than the number of points n={n}", field="total_steps")

    if weights is None:
        order = np.arange(k) % n
    else:
        order = weighted_schedule(validate_weights(weights, n), k)

    diameter = space.diameter(points, approximate=approximate_diameter)
    error_trace = []

    estimate = points[order[0]]
    for m in range(2, k + 1):
        estimate = space.interpolate(estimate, points[order[m - 1]], 1.0 / m)
        if reference is not None and record_every and m % record_every == 0:
            error_trace.append((m, float(space.distance(estimate, reference))))

    logger.debug(f"Lim–Palfia on {space.name}: n={n}, k={k}, diameter={diameter:.4g}")
    return LpResult(estimate=estimate, n_points=n, cycles_used=k, diameter=diameter, error_trace=error_trace)


def frechet_oracle(space_tag, points: Sequence[Point], weights: Optional[Sequence[float]] = None,
                   space: Optional[BookSpace] = None) -> Point:
    """
    Exact weighted barycenter where a closed form exists.

    Args:
        space_tag: OracleSpace or its value
        points: Nonempty list of points
        weights: Probability vector, uniform when None
        space: The open book, required only to pick k and d for OPEN_BOOK

    Returns:
        The barycenter

    Raises:
        DomainError: Unknown tag, invalid weights or non-commuting SPD input
    """
    try:
        tag = OracleSpace(space_tag)
    except ValueError:
        raise DomainError(f"No closed-form barycenter for '{space_tag}'", field="space_tag")

    points = list(points)
    w = validate_weights(weights, len(points))

    if tag is OracleSpace.EUCLIDEAN:
        stacked = np.stack([np.atleast_1d(np.asarray(p, dtype=float)) for p in points])
        return np.tensordot(w, stacked, axes=(0, 0))

    if tag is OracleSpace.SPD_COMMUTING:
        return commuting_barycenter(points, w)

    if space is None:
        book_points = [p for p in points if isinstance(p, BookPoint)]
        k = max(3, max(p.sheet for p in book_points))
        space = BookSpace(k=k, d=len(book_points[0].spine))
    return book_frechet(space, points, w)
