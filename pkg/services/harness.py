"""
Contamination simulation harness.

Builds the two test sequences (a diagonal SPD sequence and an open book
sequence), contaminates them with seeded Huber noise and traces every
requested estimator against the known limit.

Replications only share the base seed: replication r draws its contamination
from derive_seed(base_seed, r, 0) and its resampling indices from
derive_seed(base_seed, r, 1), so rows of one replication never depend on how
many others run or in which order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Iterable, List, Sequence

import numpy as np

from config import get_config
from models.book_point import BookPoint
from models.experiment import (
    ContaminationSpec,
    ExperimentConfig,
    ExperimentKind,
    Metric,
    NoiseKind,
    RunResult,
    RunRow,
)
from models.trace import EstimatorTag, MeanTrace
from services.errors import CapacityError, DomainError
from services.frechet import lim_palfia
from services.geometry.open_book import BookSpace
from services.geometry.space import GeodesicSpace
from services.geometry.spd import SpdSpace, spectral_distance
from services.means import es_sahib_mean, hansen_mean, inductive_mean, resampled_mean

logger = logging.getLogger(__name__)

# Diagonal SPD experiment
SPD_LIMIT = np.diag([0.1, 10.0])
SPD_NOISE = 5.0 * np.eye(2)
# Hansen limit as printed for the diagonal experiment. On commuting input the
# exact recursion converges to the commuting barycenter instead, so this is
# kept for reference only.
HANSEN_STAR = np.diag([0.26, 10.12])

# Open book experiment, B_3^1
BOOK_SHEETS = 3
BOOK_LIMIT = BookPoint(sheet=1, t=1.0, spine=(10.0,))
BOOK_NOISE_TEMPLATE = (1.0, 10.0)


def spd_sequence(n: int) -> np.ndarray:
    """A_n = diag(1/10 + 1/n, 10 + 1/n)."""
    if n < 1:
        raise DomainError(f"Sequence index must be at least 1, got {n}", field="n")
    return np.diag([0.1 + 1.0 / n, 10.0 + 1.0 / n])


def book_sequence(n: int) -> BookPoint:
    """x_n = ((1 + 2/n, 10 − 1/√n), sheet 1)."""
    if n < 1:
        raise DomainError(f"Sequence index must be at least 1, got {n}", field="n")
    return BookPoint(sheet=1, t=1.0 + 2.0 / n, spine=(10.0 - 1.0 / math.sqrt(n),))


def derive_seed(base_seed: int, *keys: int) -> int:
    """Independent child seed for (base_seed, *keys)."""
    state = np.random.SeedSequence([base_seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def contamination_mask(n: int, epsilon: float, seed: int) -> np.ndarray:
    """Bernoulli(ε) replacement flags for n indices."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return rng.random(n) < epsilon


def huber_contaminate(seq: Iterable[Any], spec: ContaminationSpec) -> List[Any]:
    """
    Replace each index independently with noise, with probability ε.

    FIXED_POINT substitutes spec.noise. RANDOM_SHEET substitutes the point
    (t, spine) = spec.noise on a sheet drawn uniformly from 1..spec.sheets.

    Returns:
        New list; the input is left untouched
    """
    seq = list(seq)
    n = len(seq)
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    mask = rng.random(n) < spec.epsilon
    # drawn regardless of ε so the sheets do not depend on the mask
    sheets = rng.integers(1, spec.sheets + 1, size=n)

    out = list(seq)
    for i in np.flatnonzero(mask):
        if spec.noise_kind is NoiseKind.FIXED_POINT:
            out[i] = spec.noise
        else:
            t, *spine = spec.noise
            out[i] = BookPoint(sheet=int(sheets[i]), t=float(t), spine=tuple(float(v) for v in spine))

    logger.debug(f"Contaminated {int(mask.sum())} of {n} points (epsilon={spec.epsilon})")
    return out


def trace_grid(n_max: int, stride: int) -> List[int]:
    """{1..10} ∪ multiples of stride ∪ {n_max}, capped at n_max."""
    grid = set(range(1, min(10, n_max) + 1))
    grid.update(range(stride, n_max + 1, stride))
    grid.add(n_max)
    return sorted(grid)


def sparse_grid(n_max: int) -> List[int]:
    """{1..10} ∪ {1, 2, 5}·10^j ∪ {n_max}: steps where non-streaming estimators are evaluated."""
    grid = set(range(1, min(10, n_max) + 1))
    scale = 10
    while scale <= n_max:
        grid.update(c * scale for c in (1, 2, 5) if c * scale <= n_max)
        scale *= 10
    grid.add(n_max)
    return sorted(grid)


def lp_budget(n: int, exponent: float, cap: int) -> int:
    """
    Whole-cycle Lim–Palfia budget n·⌈n^(e−1)⌉, capped at max(cap, n).

    Once the cap binds (n = 5000 with e = 2 and the default LP_MAX_STEPS),
    the run takes k = cap steps, so its certificate 2Δ√(n/k) is looser than
    the one the uncapped budget would give.
    """
    cycles = max(1, math.ceil(n ** (exponent - 1.0) - 1e-9))
    return max(n, min(n * cycles, cap))


def experiment_space(kind: ExperimentKind) -> GeodesicSpace:
    if kind is ExperimentKind.SPD_DIAGONAL:
        return SpdSpace(dim=2)
    return BookSpace(k=BOOK_SHEETS, d=1)


def experiment_reference(kind: ExperimentKind):
    return SPD_LIMIT if kind is ExperimentKind.SPD_DIAGONAL else BOOK_LIMIT


def experiment_sequence(kind: ExperimentKind, n_max: int) -> List[Any]:
    generator = spd_sequence if kind is ExperimentKind.SPD_DIAGONAL else book_sequence
    return [generator(i) for i in range(1, n_max + 1)]


def _rows_for(config: ExperimentConfig, space: GeodesicSpace, tag: EstimatorTag, replication: int,
              steps: Sequence, reference) -> List[RunRow]:
    rows = []
    for n, estimate in steps:
        if estimate is None:
            values = {Metric.INTRINSIC: float('nan')}
            if config.experiment is ExperimentKind.SPD_DIAGONAL:
                values[Metric.SPECTRAL] = float('nan')
        else:
            values = {Metric.INTRINSIC: float(space.distance(estimate, reference))}
            if config.experiment is ExperimentKind.SPD_DIAGONAL:
                values[Metric.SPECTRAL] = float(spectral_distance(estimate, reference))
        for metric, value in values.items():
            rows.append(RunRow(
                experiment=config.experiment.value,
                estimator=tag.value,
                replication=replication,
                n=n,
                metric=metric.value,
                value=value
            ))
    return rows


def _trace_steps(trace: MeanTrace):
    return [(step.n, step.estimate) for step in trace.steps]


def _run_replication(config: ExperimentConfig, replication: int) -> List[RunRow]:
    """All rows of one replication; module level so worker processes can pickle it."""
    cfg = get_config()
    space = experiment_space(config.experiment)
    reference = experiment_reference(config.experiment)
    spec = config.contamination.with_seed(derive_seed(config.base_seed, replication, 0))
    points = huber_contaminate(experiment_sequence(config.experiment, config.n_max), spec)

    grid = trace_grid(config.n_max, config.trace_stride)
    sparse = sparse_grid(config.n_max)
    rows: List[RunRow] = []

    for tag in config.estimators:
        if tag is EstimatorTag.INDUCTIVE:
            trace = inductive_mean(space, points, stride=config.trace_stride, record_at=grid)
            steps = _trace_steps(trace)
        elif tag is EstimatorTag.RESAMPLED:
            trace = resampled_mean(space, points, seed=derive_seed(config.base_seed, replication, 1),
                                   stride=config.trace_stride, record_at=grid)
            steps = _trace_steps(trace)
        elif tag is EstimatorTag.HANSEN:
            steps = _trace_steps(hansen_mean(space, points, record_at=sparse))
        elif tag is EstimatorTag.LIM_PALFIA:
            steps = []
            for n in sparse:
                k = lp_budget(n, config.lp_budget_exponent, cfg.LP_MAX_STEPS)
                result = lim_palfia(space, points[:n], total_steps=k, approximate_diameter=True)
                steps.append((n, result.estimate))
        else:
            steps = []
            warned = False
            for n in sparse:
                try:
                    steps.append((n, es_sahib_mean(space, points[:n])))
                except CapacityError as e:
                    if not warned:
                        logger.warning(f"Replication {replication}: {e}; remaining rows recorded as NaN")
                        warned = True
                    steps.append((n, None))

        rows.extend(_rows_for(config, space, tag, replication, steps, reference))

    logger.info(f"Replication {replication} of {config.experiment.value} (epsilon={config.epsilon}) done")
    return rows


def run_experiment(config: ExperimentConfig, max_workers: int = 1) -> RunResult:
    """
    Run every replication of an experiment and collect sorted rows.

    Args:
        config: Experiment description
        max_workers: Worker processes; 1 runs in-process

    Returns:
        RunResult with rows sorted by (estimator, replication, n, metric)
    """
    logger.info(
        f"Running {config.experiment.value}: n_max={config.n_max}, epsilon={config.epsilon}, "
        f"replications={config.replications}, estimators={[t.value for t in config.estimators]}"
    )
    replications = range(config.replications)
    result = RunResult(config_echo=config)

    if max_workers > 1 and config.replications > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            for rows in pool.map(_run_replication, [config] * config.replications, replications):
                result.rows.extend(rows)
    else:
        for r in replications:
            result.rows.extend(_run_replication(config, r))

    result.sort()
    logger.info(f"Experiment {config.experiment.value} produced {len(result.rows)} rows")
    return result
