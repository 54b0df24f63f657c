"""
Monte-Carlo verification of the heteroscedastic law of large numbers bound.

Each generator produces independent samples X_k with known barycenter μ_k
and known variance Var(X_k) = E d(X_k, μ_k)². The inductive mean is folded
over all replications at once (the points of step k are a batch with one
row per replication) and the empirical E d(S_n, μ)² is compared against
slln_bound at every grid point.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from models.bounds import BoundParams
from services.errors import DomainError
from services.geometry.euclidean import EuclideanSpace
from services.geometry.space import GeodesicSpace
from services.geometry.spd import SpdSpace
from services.means import inductive_mean, slln_bound

logger = logging.getLogger(__name__)

DEFAULT_N_GRID = (10, 100, 1000, 10000)
GROWTH_EXPONENT = 0.2


class GeneratorTag(Enum):
    EUCLIDEAN_HETERO = "euclidean_hetero"
    SPD_COMMUTING_HETERO = "spd_commuting_hetero"
    EUCLIDEAN_GROWING = "euclidean_growing"


def hetero_variance(k: np.ndarray) -> np.ndarray:
    """σ_k² = 1 + (k mod 5)/2."""
    return 1.0 + (np.asarray(k) % 5) / 2.0


class SampleGenerator:
    """
    Independent samples with drifting means μ_k = μ ⊕ (drift/k) offsets.

    Subclasses fix the space and how a sample is spread around μ_k.
    """

    tag: GeneratorTag
    q: Optional[float] = None

    def __init__(self, dim: int = 2, drift: float = 1.0, noise: float = 1.0):
        if noise < 0:
            raise DomainError(f"noise must be nonnegative, got {noise}", field="noise")
        self.dim = dim
        self.drift = drift
        self.noise = noise
        self.direction = np.ones(dim) / np.sqrt(dim)

    def mean_distance(self, k: np.ndarray) -> np.ndarray:
        """d(μ_k, μ) = drift / k."""
        return abs(self.drift) / np.asarray(k, dtype=float)

    def variance(self, k: np.ndarray) -> np.ndarray:
        return self.noise ** 2 * hetero_variance(k)

    def params(self, n_max: int) -> BoundParams:
        k = np.arange(1, n_max + 1)
        return BoundParams(mu=self.mu, mu_n=[], var_n=self.variance(k), mean_distances=self.mean_distance(k))

    def _offsets(self, k: int, rng: np.random.Generator, reps: int) -> np.ndarray:
        # rows with E = drift/k·u and E|row − drift/k·u|² = Var(X_k)
        z = rng.standard_normal((reps, self.dim)) / np.sqrt(self.dim)
        return (self.drift / k) * self.direction + np.sqrt(self.variance(k)) * z

    def samples(self, rng: np.random.Generator, reps: int, n_max: int):
        for k in range(1, n_max + 1):
            yield self._to_points(self._offsets(k, rng, reps))


class EuclideanHetero(SampleGenerator):
    tag = GeneratorTag.EUCLIDEAN_HETERO

    def __init__(self, dim: int = 2, drift: float = 1.0, noise: float = 1.0):
        super().__init__(dim, drift, noise)
        self.space: GeodesicSpace = EuclideanSpace(dim)
        self.mu = np.zeros(dim)

    def _to_points(self, offsets: np.ndarray) -> np.ndarray:
        return self.mu + offsets


class SpdCommutingHetero(SampleGenerator):
    """
    Diagonal SPD samples, Gaussian in log-coordinates around log μ_k.

    On diagonal matrices the matrix logarithm is an isometry onto Euclidean
    space, so μ_k and Var(X_k) are exact.
    """

    tag = GeneratorTag.SPD_COMMUTING_HETERO

    def __init__(self, dim: int = 2, drift: float = 1.0, noise: float = 1.0):
        super().__init__(dim, drift, noise)
        self.space = SpdSpace(dim)
        self.log_mu = np.log(np.geomspace(0.1, 10.0, dim))
        self.mu = np.diag(np.exp(self.log_mu))

    def _to_points(self, offsets: np.ndarray) -> np.ndarray:
        diag = np.exp(self.log_mu + offsets)
        out = np.zeros(diag.shape + (self.dim,))
        idx = np.arange(self.dim)
        out[:, idx, idx] = diag
        return out


class EuclideanGrowing(EuclideanHetero):
    """
    Bounded samples whose support radius grows like k^q.

    X_k = μ_k + k^q·s/√d with s a vector of independent random signs.
    """

    tag = GeneratorTag.EUCLIDEAN_GROWING
    q = GROWTH_EXPONENT

    def variance(self, k: np.ndarray) -> np.ndarray:
        return self.noise ** 2 * np.asarray(k, dtype=float) ** (2 * self.q)

    def _offsets(self, k: int, rng: np.random.Generator, reps: int) -> np.ndarray:
        signs = rng.choice([-1.0, 1.0], size=(reps, self.dim)) / np.sqrt(self.dim)
        return (self.drift / k) * self.direction + self.noise * k ** self.q * signs


GENERATORS: Dict[GeneratorTag, Callable[..., SampleGenerator]] = {
    GeneratorTag.EUCLIDEAN_HETERO: EuclideanHetero,
    GeneratorTag.SPD_COMMUTING_HETERO: SpdCommutingHetero,
    GeneratorTag.EUCLIDEAN_GROWING: EuclideanGrowing,
}


def get_generator(generator_tag, **kwargs) -> SampleGenerator:
    try:
        tag = GeneratorTag(str(getattr(generator_tag, 'value', generator_tag)).replace("-", "_"))
    except ValueError:
        raise DomainError(f"Unknown generator '{generator_tag}'", field="generator")
    return GENERATORS[tag](**kwargs)


def cesaro_exponent(distances: Sequence[float], n_points: int = 20) -> float:
    """
    Decay exponent p of (1/n)Σ_{k<=n} d(μ_k, μ).

    Least-squares slope of the Cesàro averages against n on a log-log grid
    over the last three decades of the sequence (never below n = 10), sign
    flipped.

    Raises:
        DomainError: If fewer than 20 distances are given
    """
    d = np.asarray(distances, dtype=float)
    if d.shape[0] < 20:
        raise DomainError("Need at least 20 distances to fit an exponent", field="distances")
    averages = np.cumsum(d) / np.arange(1, d.shape[0] + 1)
    start = max(10, d.shape[0] // 1000)
    grid = np.unique(np.geomspace(start, d.shape[0], n_points).astype(int))
    values = averages[grid - 1]
    if np.any(values <= 0):
        return float('inf')
    slope, _ = np.polyfit(np.log(grid), np.log(values), 1)
    return float(-slope)


def strong_law_applies(p: float, q: float) -> bool:
    """Growing-support condition 0 <= q < min(1/4, p − 1/2) for almost sure convergence."""
    return 0.0 <= q < min(0.25, p - 0.5)


@dataclass
class BoundRow:
    n: int
    empirical: float
    sem: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.empirical - 3.0 * self.sem <= self.bound


@dataclass
class BoundReport:
    """Outcome of one Monte-Carlo bound check."""
    generator: str
    replications: int
    base_seed: int
    rows: List[BoundRow] = field(default_factory=list)
    cesaro_p: Optional[float] = None
    growth_q: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def strong_law(self) -> Optional[bool]:
        if self.cesaro_p is None or self.growth_q is None:
            return None
        return strong_law_applies(self.cesaro_p, self.growth_q)

    @property
    def failed_items(self) -> List[str]:
        return [f"n={row.n}" for row in self.rows if not row.passed]


def monte_carlo_bound_check(
    generator_tag,
    n_grid: Sequence[int] = DEFAULT_N_GRID,
    replications: int = 500,
    base_seed: int = 0,
    drift: float = 1.0,
    noise: float = 1.0,
) -> BoundReport:
    """
    Compare empirical E d(S_n, μ)² with slln_bound on a grid of n.

    Args:
        generator_tag: euclidean_hetero, spd_commuting_hetero or euclidean_growing
        n_grid: Sample sizes to check
        replications: Independent sequences folded in parallel
        base_seed: Seed of all draws
        drift: Scale of the mean drift μ_k − μ
        noise: Scale of the sample spread (0 gives a deterministic sequence)

    Returns:
        BoundReport listing (n, empirical, sem, bound) per grid point

    Raises:
        DomainError: Unknown generator or empty grid
    """
    generator = get_generator(generator_tag, drift=drift, noise=noise)
    grid = sorted({int(n) for n in n_grid})
    if not grid or grid[0] < 1:
        raise DomainError("n_grid must contain positive sizes", field="n_grid")
    if replications < 1:
        raise DomainError(f"replications must be at least 1, got {replications}", field="replications")

    n_max = grid[-1]
    params = generator.params(n_max)
    rng = np.random.default_rng(np.random.SeedSequence(base_seed))

    logger.info(f"Bound check on {generator.tag.value}: n_max={n_max}, replications={replications}")
    trace = inductive_mean(
        generator.space,
        generator.samples(rng, replications, n_max),
        reference=generator.mu,
        stride=n_max + 1,
        record_at=grid,
    )

    report = BoundReport(generator=generator.tag.value, replications=replications, base_seed=base_seed,
                         growth_q=generator.q)
    for n in grid:
        sq = np.asarray(trace.at(n).dist_to_reference, dtype=float) ** 2
        sem = float(sq.std(ddof=1) / np.sqrt(replications)) if replications > 1 else 0.0
        report.rows.append(BoundRow(n=n, empirical=float(sq.mean()), sem=sem, bound=slln_bound(params, n)))

    if n_max >= 20:
        report.cesaro_p = cesaro_exponent(params.mean_distances)

    logger.info(f"Bound check on {generator.tag.value}: passed={report.passed}")
    return report
