"""
Geometric property checks shared by every space.

The gaps returned here are "right-hand side minus left-hand side" of the
comparison inequalities, so a Hadamard space gives values >= 0 up to
rounding and the flat case gives exactly 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from services.errors import DomainError
from .space import GeodesicSpace, Point, Sampler, validate_t, validate_weights

logger = logging.getLogger(__name__)


def npc_gap(space: GeodesicSpace, x: Point, y: Point, z: Point, t: float):
    """
    NPC comparison gap along the geodesic from x to y, seen from z.

    (1−t)d(z,x)² + t·d(z,y)² − t(1−t)d(x,y)² − d(z, x ⊕_t y)²

    Raises:
        DomainError: If t is outside [0, 1]
    """
    t = validate_t(t)
    gamma = space.interpolate(x, y, t)
    dzx = space.distance(z, x)
    dzy = space.distance(z, y)
    dxy = space.distance(x, y)
    dzg = space.distance(z, gamma)
    return (1.0 - t) * dzx ** 2 + t * dzy ** 2 - t * (1.0 - t) * dxy ** 2 - dzg ** 2


def midpoint_gap(space: GeodesicSpace, x: Point, y: Point, z: Point):
    """Midpoint form of the CAT(0) inequality: ½d(z,x)² + ½d(z,y)² − ¼d(x,y)² − d(z,m)²."""
    m = space.midpoint(x, y)
    return (0.5 * space.distance(z, x) ** 2 + 0.5 * space.distance(z, y) ** 2
            - 0.25 * space.distance(x, y) ** 2 - space.distance(z, m) ** 2)


def variance_gap(space: GeodesicSpace, points: Sequence[Point], weights: Optional[Sequence[float]],
                 candidate_mean: Point, z: Point) -> float:
    """
    Variance inequality gap for a candidate barycenter m.

    Σ w_k d(x_k,z)² − Σ w_k d(x_k,m)² − d(m,z)²

    Nonnegative when m is the true weighted barycenter.

    Raises:
        DomainError: If the weights are invalid or do not match the points
    """
    batch = space.stack(points)
    w = validate_weights(weights, len(batch))
    to_z = np.asarray(space.distance(batch, z), dtype=float)
    to_m = np.asarray(space.distance(batch, candidate_mean), dtype=float)
    return float(w @ to_z ** 2 - w @ to_m ** 2 - space.distance(candidate_mean, z) ** 2)


@dataclass
class AxiomReport:
    """Largest relative violation per property over all sampled cases."""
    space: str
    n_cases: int
    tol: float
    violations: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.violations.values())

    @property
    def failed_items(self):
        return [name for name, v in self.violations.items() if v > self.tol]

    def as_rows(self):
        return [(name, v, v <= self.tol) for name, v in self.violations.items()]


AXIOMS = ("symmetry", "identity", "triangle", "geodesic_endpoint", "geodesic_speed", "npc", "midpoint")


def check_metric_axioms(space: GeodesicSpace, sampler: Sampler, n_cases: int, tol: float,
                        rng: Optional[np.random.Generator] = None, n_params: int = 8) -> AxiomReport:
    """
    Sample triples and measure how far each geodesic-space property is violated.

    Args:
        space: Space under test
        sampler: Zero-argument callable returning a random valid point
        n_cases: Number of sampled triples
        tol: Pass threshold on every relative violation
        rng: Generator for the geodesic parameters s and t
        n_params: Number of (s, t) pairs evaluated on every triple

    Returns:
        AxiomReport with one entry per property

    Raises:
        DomainError: If n_cases < 1
    """
    if n_cases < 1:
        raise DomainError(f"n_cases must be at least 1, got {n_cases}", field="n_cases")
    rng = rng if rng is not None else np.random.default_rng(0)

    xs = space.stack([sampler() for _ in range(n_cases)])
    ys = space.stack([sampler() for _ in range(n_cases)])
    zs = space.stack([sampler() for _ in range(n_cases)])

    dxy = np.asarray(space.distance(xs, ys))
    dyx = np.asarray(space.distance(ys, xs))
    dxz = np.asarray(space.distance(xs, zs))
    dzy = np.asarray(space.distance(zs, ys))
    dxx = np.asarray(space.distance(xs, xs))

    scale = 1.0 + dxy
    violations = {
        "symmetry": float(np.max(np.abs(dxy - dyx) / scale)),
        "identity": float(np.max(dxx)),
        "triangle": float(np.max(np.maximum(dxy - dxz - dzy, 0.0) / (1.0 + dxz + dzy))),
    }

    start = space.interpolate(xs, ys, 0.0)
    end = space.interpolate(xs, ys, 1.0)
    endpoint = np.maximum(np.asarray(space.distance(start, xs)), np.asarray(space.distance(end, ys)))
    violations["geodesic_endpoint"] = float(np.max(endpoint / scale))

    npc_scale = 1.0 + dxy ** 2 + dxz ** 2
    violations["geodesic_speed"] = 0.0
    violations["npc"] = 0.0
    for s, t in rng.uniform(0.0, 1.0, size=(n_params, 2)):
        gs = space.interpolate(xs, ys, s)
        gt = space.interpolate(xs, ys, t)
        speed = np.abs(np.asarray(space.distance(gs, gt)) - abs(t - s) * dxy)
        violations["geodesic_speed"] = max(violations["geodesic_speed"], float(np.max(speed / scale)))

        npc = np.asarray(npc_gap(space, xs, ys, zs, t))
        violations["npc"] = max(violations["npc"], float(np.max(np.maximum(-npc, 0.0) / npc_scale)))

    mid = np.asarray(midpoint_gap(space, xs, ys, zs))
    violations["midpoint"] = float(np.max(np.maximum(-mid, 0.0) / npc_scale))

    report = AxiomReport(space=space.name, n_cases=n_cases, tol=tol, violations=violations)
    logger.info(f"Property check on {space.name}: {n_cases} cases, passed={report.passed}")
    return report
