"""
Hadamard space implementations.

Everything generic in the package is written against GeodesicSpace; the
concrete spaces are the Euclidean reference, the affine-invariant SPD
manifold and the open book.
"""

from .space import GeodesicSpace, validate_t, validate_weights
from .euclidean import EuclideanSpace
from .spd import SpdSpace
from .open_book import BookSpace, book_frechet, folded_means

__all__ = [
    'GeodesicSpace',
    'validate_t',
    'validate_weights',
    'EuclideanSpace',
    'SpdSpace',
    'BookSpace',
    'book_frechet',
    'folded_means',
]
