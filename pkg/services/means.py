"""
Sequential mean constructions on Hadamard spaces.

All estimators are written against GeodesicSpace. The streaming ones
(inductive and resampled) accept any iterable and fold one point per step;
Hansen and Es-Sahib–Heinich need the whole list.

Feeding batches instead of single points (one row per replication) runs
that many independent folds at once for the inductive mean.
"""

import logging
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np

from config import get_config
from models.bounds import BoundParams
from models.trace import EstimatorTag, MeanTrace, should_record
from services.errors import CapacityError, ConvergenceError, DomainError
from services.frechet import lim_palfia
from services.geometry.space import GeodesicSpace, Point, validate_weights

logger = logging.getLogger(__name__)


def _distance_or_none(space: GeodesicSpace, estimate: Point, reference: Optional[Point]):
    if reference is None:
        return None
    return space.distance(estimate, reference)


def inductive_mean(
    space: GeodesicSpace,
    points: Iterable[Point],
    reference: Optional[Point] = None,
    stride: int = 1,
    record_at: Iterable[int] = (),
) -> MeanTrace:
    """
    Inductive mean S_1 = x_1, S_{n+1} = S_n ⊕_{1/(n+1)} x_{n+1}.

    Args:
        space: Geodesic space of the points
        points: Nonempty iterable, consumed once
        reference: Optional point whose distance is stored with each step
        stride: Record every stride-th step after the first ten (1 keeps all)
        record_at: Extra steps to record

    Returns:
        MeanTrace whose last step is S_n

    Raises:
        DomainError: If points is empty
    """
    record_at = set(record_at)
    trace = MeanTrace(estimator_tag=EstimatorTag.INDUCTIVE)
    estimate = None
    n = 0
    recorded = 0

    for x in points:
        n += 1
        estimate = x if n == 1 else space.interpolate(estimate, x, 1.0 / n)
        if should_record(n, stride, record_at):
            trace.record(n, estimate, _distance_or_none(space, estimate, reference))
            recorded = n

    if n == 0:
        raise DomainError("inductive_mean needs at least one point", field="points")
    if recorded != n:
        trace.record(n, estimate, _distance_or_none(space, estimate, reference))

    logger.debug(f"Inductive mean folded {n} points on {space.name}")
    return trace


def hansen_value(space: GeodesicSpace, batch) -> Point:
    """
    Hansen's mean H_n of a batch by the exact recursion.

    H_n(x_1..x_n) = H_{n−1}(x_1 ⊕_{1/n} x_n, …, x_{n−1} ⊕_{1/n} x_n); each
    level contracts all earlier points toward the newest in one batched call.

    Args:
        space: Geodesic space of the points
        batch: Points as returned by space.stack
    """
    m = len(batch)
    if m == 0:
        raise DomainError("hansen_mean needs at least one point", field="points")
    while m > 1:
        batch = space.interpolate(batch[:m - 1], batch[m - 1], 1.0 / m)
        m -= 1
    return batch[0]


def hansen_mean(
    space: GeodesicSpace,
    points: Sequence[Point],
    reference: Optional[Point] = None,
    record_at: Optional[Iterable[int]] = None,
) -> MeanTrace:
    """
    Hansen's recursive mean with a trace over prefixes.

    Every prefix costs O(m²) interpolations, so callers with long sequences
    should restrict record_at.

    Args:
        space: Geodesic space of the points
        points: Nonempty list
        reference: Optional point whose distance is stored with each step
        record_at: Prefix lengths to evaluate; None means every prefix

    Returns:
        MeanTrace of H_m for the requested m (and always m = n)
    """
    points = list(points)
    if not points:
        raise DomainError("hansen_mean needs at least one point", field="points")
    batch = space.stack(points)
    n = len(batch)

    prefixes = set(range(1, n + 1)) if record_at is None else {m for m in record_at if 1 <= m <= n}
    prefixes.add(n)

    trace = MeanTrace(estimator_tag=EstimatorTag.HANSEN)
    for m in sorted(prefixes):
        estimate = hansen_value(space, batch[:m])
        trace.record(m, estimate, _distance_or_none(space, estimate, reference))
    return trace


def _tuple_spread(space: GeodesicSpace, tuple_batches: List[Any]) -> float:
    # 2·max_i d(x_1, x_i) bounds the diameter from above
    first = tuple_batches[0]
    return 2.0 * max(float(np.max(space.distance(first, other))) for other in tuple_batches[1:])


def _beta(space: GeodesicSpace, tuple_batches: List[Any], tol: float, max_rounds: int) -> Any:
    """β_m applied row-wise to m batches of equal length."""
    m = len(tuple_batches)
    if m == 1:
        return tuple_batches[0]
    if m == 2:
        return space.interpolate(tuple_batches[0], tuple_batches[1], 0.5)

    current = tuple_batches
    spread = _tuple_spread(space, current)
    for rounds in range(max_rounds):
        if spread <= tol:
            return current[0]
        # all m deletions at once: position p of deletion i is x_p for p < i, else x_{p+1}
        reduced = [
            space.concat([current[p if p < i else p + 1] for i in range(m)])
            for p in range(m - 1)
        ]
        current = space.split(_beta(space, reduced, tol, max_rounds), m)
        spread = _tuple_spread(space, current)

    if spread <= tol:
        return current[0]
    raise ConvergenceError(
        f"Es-Sahib–Heinich iteration for {m} points did not contract below tolerance",
        final_diameter=spread,
        rounds=max_rounds,
        tolerance=tol
    )


def es_sahib_mean(
    space: GeodesicSpace,
    points: Sequence[Point],
    tol: Optional[float] = None,
    max_rounds: Optional[int] = None,
    n_cap: Optional[int] = None,
) -> Point:
    """
    Es-Sahib–Heinich mean β_n by iterating its symmetrization map.

    β_1 is the identity and β_2 the midpoint. For n >= 3 the tuple is
    replaced by (β_{n−1}(all but x_1), …, β_{n−1}(all but x_n)) until its
    diameter is at most tol, and any element is returned.

    Args:
        space: Geodesic space of the points
        points: 1..n_cap points
        tol: Diameter tolerance (default Config.ES_SAHIB_TOL)
        max_rounds: Round budget per recursion level (default Config.ES_SAHIB_MAX_ROUNDS)
        n_cap: Largest accepted n (default Config.ES_SAHIB_N_CAP)

    Returns:
        The mean as a single point

    Raises:
        DomainError: If points is empty or tol is not positive
        CapacityError: If n exceeds n_cap
        ConvergenceError: If a level exhausts max_rounds
    """
    cfg = get_config()
    tol = cfg.ES_SAHIB_TOL if tol is None else tol
    max_rounds = cfg.ES_SAHIB_MAX_ROUNDS if max_rounds is None else max_rounds
    n_cap = cfg.ES_SAHIB_N_CAP if n_cap is None else n_cap

    points = list(points)
    n = len(points)
    if n == 0:
        raise DomainError("es_sahib_mean needs at least one point", field="points")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}", field="tol")
    if n > n_cap:
        raise CapacityError("Es-Sahib–Heinich mean is exponential in n", requested=n, capacity=n_cap)

    tuple_batches = [space.stack([p]) for p in points]
    result = _beta(space, tuple_batches, tol, max_rounds)
    logger.debug(f"Es-Sahib–Heinich mean of {n} points converged")
    return result[0]


def resampled_index(seed: int, n: int) -> int:
    """
    Uniform index in {0, …, n−1} for step n of the resampled mean.

    The draw depends only on (seed, n) through a counter-based generator, so
    any step can be replayed without the ones before it.
    """
    rng = np.random.Generator(np.random.Philox(key=seed, counter=n << 64))
    return int(rng.integers(0, n))


def resampled_mean(
    space: GeodesicSpace,
    points: Iterable[Point],
    seed: int,
    reference: Optional[Point] = None,
    stride: int = 1,
    record_at: Iterable[int] = (),
) -> MeanTrace:
    """
    Resampled mean M_1 = Y_1, M_n = M_{n−1} ⊕_{1/n} Y_n.

    Y_n is drawn uniformly from {x_1, …, x_n}, the newest point included,
    before the fold at step n.

    Args:
        space: Geodesic space of the points
        points: Nonempty iterable, consumed once
        seed: Fixes the whole draw sequence
        reference: Optional point whose distance is stored with each step
        stride: Record every stride-th step after the first ten
        record_at: Extra steps to record

    Returns:
        MeanTrace tagged RESAMPLED carrying the seed
    """
    if seed < 0:
        raise DomainError(f"seed must be nonnegative, got {seed}", field="seed")
    record_at = set(record_at)
    trace = MeanTrace(estimator_tag=EstimatorTag.RESAMPLED, seed=seed)
    seen: List[Point] = []
    estimate = None
    recorded = 0

    for x in points:
        seen.append(x)
        n = len(seen)
        y = seen[resampled_index(seed, n)]
        estimate = y if n == 1 else space.interpolate(estimate, y, 1.0 / n)
        if should_record(n, stride, record_at):
            trace.record(n, estimate, _distance_or_none(space, estimate, reference))
            recorded = n

    if not seen:
        raise DomainError("resampled_mean needs at least one point", field="points")
    if recorded != len(seen):
        trace.record(len(seen), estimate, _distance_or_none(space, estimate, reference))
    return trace


def weighted_mean_toeplitz(space: GeodesicSpace, points: Sequence[Point],
                           weights: Sequence[float], lp_cycles: int) -> Point:
    """
    Weighted barycenter approximated by the weighted Lim–Palfia scheme.

    Runs lp_cycles full cycles, i.e. lp_cycles·n inductive steps.
    """
    points = list(points)
    if lp_cycles < 1:
        raise DomainError(f"lp_cycles must be at least 1, got {lp_cycles}", field="lp_cycles")
    validate_weights(weights, len(points))
    return lim_palfia(space, points, weights=weights, total_steps=lp_cycles * len(points)).estimate


def slln_bound(params: BoundParams, n: int) -> float:
    """
    Upper bound on E d(S_n, μ)² for independent heteroscedastic samples.

    (9 D_n / n) Σ_{k<=n} d(μ_k, μ) + n⁻² Σ_{k<=n} Var(X_k)

    Raises:
        DomainError: If n is outside 1..len(params)
    """
    spread = params.max_spread(n)
    sum_dist, sum_var = params.prefix_sums(n)
    return 9.0 * spread / n * sum_dist + sum_var / n ** 2
