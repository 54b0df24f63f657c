"""
Open book B_k^d: k closed half-spaces H₊^d glued along their common spine.

Two points on the same sheet are joined by a straight segment. Points on
different sheets are joined through the spine, and unfolding the two sheets
into one plane turns that path into a segment from (t_p, x_p) to (−t_q, x_q).
This gives the closed forms used below.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from models.book_point import BookBatch, BookPoint
from services.errors import DomainError
from .space import GeodesicSpace, validate_t, validate_weights

logger = logging.getLogger(__name__)

BookLike = Union[BookPoint, BookBatch]


class BookSpace(GeodesicSpace):
    """Open book with k sheets and a d-dimensional spine."""

    name = "open_book"

    def __init__(self, k: int = 3, d: int = 1, tol_point: Optional[float] = None,
                 spine_probability: float = 0.1):
        """
        Args:
            k: Number of sheets (>= 2)
            d: Spine dimension (>= 0)
            tol_point: Spine membership and point equality threshold
            spine_probability: Share of sampled points placed on the spine
        """
        super().__init__(tol_point)
        if k < 2:
            raise DomainError(f"An open book needs at least 2 sheets, got {k}", field="k")
        if d < 0:
            raise DomainError(f"Spine dimension must be nonnegative, got {d}", field="d")
        self.k = k
        self.d = d
        self.spine_probability = spine_probability

    def __repr__(self):
        return f"BookSpace(k={self.k}, d={self.d})"

    def point(self, sheet: int, t: float, spine: Sequence[float] = ()) -> BookPoint:
        """Build a canonical point of this book."""
        return self.canonicalize(BookPoint(sheet=int(sheet), t=float(t), spine=tuple(float(v) for v in spine)))

    # ------------------------------------------------------------------
    # array plumbing
    # ------------------------------------------------------------------

    def _parts(self, p: BookLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
        if isinstance(p, BookPoint):
            sheets = np.asarray(p.sheet, dtype=int)
            t = np.asarray(p.t, dtype=float)
            x = np.asarray(p.spine, dtype=float).reshape(len(p.spine))
            single = True
        elif isinstance(p, BookBatch):
            sheets, t, x = p.sheets, p.t, p.spine
            single = False
        else:
            raise DomainError(f"Expected BookPoint or BookBatch, got {type(p).__name__}", field="point")

        if x.shape[-1] != self.d:
            raise DomainError(
                f"Point has {x.shape[-1]} spine coordinates, {self} expects {self.d}",
                field="point"
            )
        if np.any((sheets < 1) | (sheets > self.k)):
            raise DomainError(f"Sheet index outside 1..{self.k}", field="point")
        return sheets, t, x, single

    def _build(self, sheets, t, x, single: bool) -> BookLike:
        t = np.where(t <= self.tol_point, 0.0, t)
        sheets = np.where(t == 0.0, 1, sheets)
        if single:
            return BookPoint(sheet=int(sheets), t=float(t), spine=tuple(float(v) for v in x))
        n = t.shape[0]
        return BookBatch(
            sheets=np.broadcast_to(sheets, (n,)).astype(int),
            t=np.asarray(t, dtype=float),
            spine=np.broadcast_to(x, (n, self.d)).astype(float)
        )

    def stack(self, points) -> BookBatch:
        if isinstance(points, BookBatch):
            return points
        return BookBatch.from_points(points, self.d)

    def concat(self, batches) -> BookBatch:
        batches = list(batches)
        return BookBatch(
            sheets=np.concatenate([b.sheets for b in batches]),
            t=np.concatenate([b.t for b in batches]),
            spine=np.concatenate([b.spine for b in batches], axis=0)
        )

    def split(self, batch: BookBatch, parts: int) -> List[BookBatch]:
        return [
            BookBatch(s, t, x)
            for s, t, x in zip(np.split(batch.sheets, parts), np.split(batch.t, parts),
                               np.split(batch.spine, parts, axis=0))
        ]

    # ------------------------------------------------------------------
    # geometry
    # ------------------------------------------------------------------

    def canonicalize(self, p: BookLike) -> BookLike:
        """
        Clamp tiny negative t and identify spine points across sheets.

        Raises:
            DomainError: If t < −tol_point
        """
        sheets, t, x, single = self._parts(p)
        if np.any(t < -self.tol_point):
            raise DomainError(f"Distance to the spine must be nonnegative, got {float(np.min(t))}", field="t")
        if np.any(t < 0):
            logger.debug("Clamped negative spine distance to 0")
        return self._build(sheets, np.maximum(t, 0.0), x, single)

    def distance(self, p: BookLike, q: BookLike):
        sp, tp, xp, single_p = self._parts(p)
        sq, tq, xq, single_q = self._parts(q)

        # spine points have t = 0, so both branches agree there
        dt = np.where(sp == sq, tp - tq, tp + tq)
        dx = xp - xq
        d = np.sqrt(dt * dt + np.sum(dx * dx, axis=-1))
        return float(d) if single_p and single_q else d

    def interpolate(self, p: BookLike, q: BookLike, t: float) -> BookLike:
        u = validate_t(t)
        sp, tp, xp, single_p = self._parts(p)
        sq, tq, xq, single_q = self._parts(q)
        single = single_p and single_q

        if u == 0.0 or u == 1.0:
            sheets, s, x = (sp, tp, xp) if u == 0.0 else (sq, tq, xq)
            if not single:
                n = len(p) if not single_p else len(q)
                sheets = np.broadcast_to(sheets, (n,))
                s = np.broadcast_to(s, (n,))
            return self._build(sheets, s, x, single)

        # signed first coordinate in the unfolded picture, positive on p's sheet
        sign = np.where(sp == sq, 1.0, -1.0)
        s = (1.0 - u) * tp + sign * u * tq
        sheets = np.where(s >= 0.0, sp, sq)
        x = (1.0 - u) * xp + u * xq
        return self._build(sheets, np.abs(s), x, single)

    def sample(self, rng: np.random.Generator) -> BookPoint:
        x = tuple(float(v) for v in rng.normal(scale=2.0, size=self.d))
        if rng.random() < self.spine_probability:
            return BookPoint(sheet=1, t=0.0, spine=x)
        sheet = int(rng.integers(1, self.k + 1))
        return BookPoint(sheet=sheet, t=float(rng.exponential(1.5)) + self.tol_point * 10, spine=x)


def folded_means(space: BookSpace, points: Sequence[BookPoint],
                 weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    Folded first-coordinate means, one per sheet.

    For sheet j, points on j count with +t and all others with −t; entry j−1
    of the result is the weighted mean of those signed coordinates.
    """
    batch = space.stack(points)
    w = validate_weights(weights, len(batch))
    sheets = np.arange(1, space.k + 1)[:, None]
    signed = np.where(batch.sheets[None, :] == sheets, batch.t[None, :], -batch.t[None, :])
    return signed @ w


def book_frechet(space: BookSpace, points: Sequence[BookPoint],
                 weights: Optional[Sequence[float]] = None) -> BookPoint:
    """
    Exact weighted Fréchet mean on an open book by folding.

    At most one sheet has a positive folded mean; the barycenter lies on that
    sheet at that height. When no sheet does, the barycenter sits on the
    spine.

    Args:
        space: The open book
        points: Canonical points
        weights: Probability vector, uniform when None

    Returns:
        Canonical BookPoint

    Raises:
        DomainError: If weights are invalid
    """
    batch = space.stack(points)
    w = validate_weights(weights, len(batch))
    folded = folded_means(space, batch, w)
    spine = w @ batch.spine if space.d > 0 else np.zeros(0)

    best = int(np.argmax(folded))
    if folded[best] > space.tol_point:
        if np.sum(folded > space.tol_point) > 1:
            logger.warning(f"Several sheets have a positive folded mean: {folded}")
        return BookPoint(sheet=best + 1, t=float(folded[best]), spine=tuple(float(v) for v in spine))

    logger.debug(f"Folded means {folded} are all nonpositive; barycenter on the spine")
    return BookPoint(sheet=1, t=0.0, spine=tuple(float(v) for v in spine))
