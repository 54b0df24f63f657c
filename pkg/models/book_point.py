"""
Open book point records.

A point of B_k^d is a sheet label, the distance t >= 0 to the spine, and the
spine coordinates x in R^d. Spine points (t = 0) carry sheet 1 so that
equality is well-defined.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np


@dataclass(frozen=True)
class BookPoint:
    """Single point ((t, x), sheet) of an open book."""
    sheet: int
    t: float
    spine: Tuple[float, ...] = ()

    @property
    def on_spine(self) -> bool:
        return self.t == 0.0

    @property
    def coords(self) -> np.ndarray:
        return np.asarray(self.spine, dtype=float)

    def __str__(self):
        x = ", ".join(f"{v:g}" for v in self.spine)
        return f"(({self.t:g}, ({x})), {self.sheet})"


@dataclass
class BookBatch:
    """
    Structure-of-arrays batch of open book points.

    Attributes:
        sheets: Integer array of shape (m,)
        t: Float array of shape (m,)
        spine: Float array of shape (m, d)
    """
    sheets: np.ndarray
    t: np.ndarray
    spine: np.ndarray

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, index) -> Union['BookPoint', 'BookBatch']:
        if isinstance(index, (int, np.integer)):
            return BookPoint(
                sheet=int(self.sheets[index]),
                t=float(self.t[index]),
                spine=tuple(float(v) for v in self.spine[index])
            )
        return BookBatch(self.sheets[index], self.t[index], self.spine[index])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @classmethod
    def from_points(cls, points, d: int) -> 'BookBatch':
        points = list(points)
        return cls(
            sheets=np.array([p.sheet for p in points], dtype=int),
            t=np.array([p.t for p in points], dtype=float),
            spine=np.array([p.spine for p in points], dtype=float).reshape(len(points), d)
        )
