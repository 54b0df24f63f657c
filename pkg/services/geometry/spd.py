"""
SPD manifold with the affine-invariant metric.

Symmetric positive-definite matrices are plain float arrays of shape
(..., n, n); leading axes are batch axes and every routine below broadcasts
over them. Matrix functions go through one symmetric eigendecomposition,
which gives log, exp, square roots and real powers from the same
factorization at the small dimensions used here.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.stats import ortho_group

from config import get_config
from services.errors import DomainError, NumericError
from .space import GeodesicSpace, Point, validate_t, validate_weights

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
MAX_DIM = 32


class MatrixFunction(Enum):
    """Scalar functions applied to the spectrum of a symmetric matrix"""
    LOG = "log"
    EXP = "exp"
    SQRT = "sqrt"
    INV_SQRT = "inv_sqrt"
    POWER = "power"


@dataclass
class SymEigen:
    """Orthogonal diagonalization A = Q diag(eigenvalues) Qᵀ, eigenvalues descending."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues[..., None, :]) @ np.swapaxes(Q, -1, -2)


def _symmetrize(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def _check_square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DomainError(f"Expected square matrices, got shape {A.shape}", field=name)
    if A.shape[-1] > MAX_DIM:
        raise DomainError(
            f"Matrix dimension {A.shape[-1]} exceeds the supported maximum {MAX_DIM}",
            field=name
        )
    if not np.all(np.isfinite(A)):
        raise NumericError(f"Non-finite entries in {name}")
    return A


def _check_symmetric(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = _check_square(A, name)
    asym = np.abs(A - np.swapaxes(A, -1, -2))
    limit = SYMMETRY_TOL * np.maximum(1.0, np.abs(A))
    if np.any(asym > limit):
        raise DomainError(
            f"Matrix is not symmetric: max asymmetry {asym.max():.3e}",
            field=name
        )
    return A


def _check_same_dim(A: np.ndarray, B: np.ndarray):
    if A.shape[-1] != B.shape[-1]:
        raise DomainError(
            f"Dimension mismatch: {A.shape[-1]}x{A.shape[-1]} vs {B.shape[-1]}x{B.shape[-1]}",
            field="B"
        )


def _eigh(A: np.ndarray):
    try:
        w, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"Symmetric eigensolver did not converge: {e}") from e
    return w, Q


def _apply_to_spectrum(w: np.ndarray, Q: np.ndarray, fn: MatrixFunction, power: Optional[float],
                       eps_pd: float) -> np.ndarray:
    if fn is not MatrixFunction.EXP:
        smallest = float(np.min(w))
        if smallest <= eps_pd:
            raise DomainError(
                f"Matrix is not positive definite: eigenvalue {smallest:.6g} <= {eps_pd:g} "
                f"(required by {fn.value})",
                field="A"
            )

    if fn is MatrixFunction.LOG:
        fw = np.log(w)
    elif fn is MatrixFunction.EXP:
        fw = np.exp(w)
    elif fn is MatrixFunction.SQRT:
        fw = np.sqrt(w)
    elif fn is MatrixFunction.INV_SQRT:
        fw = 1.0 / np.sqrt(w)
    else:
        if power is None:
            raise DomainError("MatrixFunction.POWER requires an exponent", field="power")
        fw = w ** power

    if not np.all(np.isfinite(fw)):
        raise NumericError(f"Non-finite spectrum after applying {fn.value}")

    return _symmetrize((Q * fw[..., None, :]) @ np.swapaxes(Q, -1, -2))


def sym_eig(A) -> SymEigen:
    """
    Symmetric eigendecomposition with eigenvalues in descending order.

    Raises:
        DomainError: If A is not square or not symmetric
        NumericError: If the eigensolver fails
    """
    A = _check_symmetric(A)
    w, Q = _eigh(_symmetrize(A))
    return SymEigen(eigenvalues=w[..., ::-1].copy(), eigenvectors=Q[..., ::-1].copy())


def sym_matfn(A, fn: MatrixFunction, power: Optional[float] = None,
              eps_pd: Optional[float] = None) -> np.ndarray:
    """
    Apply a scalar function to the spectrum: Q f(Λ) Qᵀ.

    Args:
        A: Symmetric matrix (batch)
        fn: Which function to apply
        power: Exponent for MatrixFunction.POWER
        eps_pd: Positivity threshold on the smallest eigenvalue

    Returns:
        Symmetric matrix (batch) of the same shape

    Raises:
        DomainError: If positivity is required and an eigenvalue is <= eps_pd
    """
    eps_pd = get_config().EPS_PD if eps_pd is None else eps_pd
    fn = MatrixFunction(fn)
    A = _check_symmetric(A)
    w, Q = _eigh(_symmetrize(A))
    return _apply_to_spectrum(w, Q, fn, power, eps_pd)


def _matfn(A: np.ndarray, fn: MatrixFunction, power: Optional[float] = None,
           eps_pd: Optional[float] = None) -> np.ndarray:
    # internal path: inputs are symmetric up to rounding
    eps_pd = get_config().EPS_PD if eps_pd is None else eps_pd
    w, Q = _eigh(_symmetrize(A))
    return _apply_to_spectrum(w, Q, fn, power, eps_pd)


def _congruence(M: np.ndarray, A: np.ndarray) -> np.ndarray:
    return _symmetrize(M @ A @ M)


def spd_distance(A, B, eps_pd: Optional[float] = None):
    """
    Affine-invariant distance ‖log(B^{-1/2} A B^{-1/2})‖_F.

    Returns:
        Nonnegative float (array for batched input)

    Raises:
        DomainError: Dimension mismatch or non positive-definite input
    """
    eps_pd = get_config().EPS_PD if eps_pd is None else eps_pd
    A = _check_symmetric(A, "A")
    B = _check_symmetric(B, "B")
    _check_same_dim(A, B)

    B_isqrt = _matfn(B, MatrixFunction.INV_SQRT, eps_pd=eps_pd)
    C = _congruence(B_isqrt, A)
    w, _ = _eigh(C)
    if np.min(w) <= eps_pd:
        raise DomainError(
            f"Matrix is not positive definite: eigenvalue {float(np.min(w)):.6g} <= {eps_pd:g}",
            field="A"
        )
    d = np.sqrt(np.sum(np.log(w) ** 2, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def spd_interpolate(A, B, t: float, eps_pd: Optional[float] = None) -> np.ndarray:
    """
    Geodesic point A ⊕_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.

    When A is a batch and B a single matrix the reversed form
    B ⊕_{1-t} A is used, which needs only one batched eigendecomposition.
    """
    t = validate_t(t)
    A = _check_symmetric(A, "A")
    B = _check_symmetric(B, "B")
    _check_same_dim(A, B)
    shape = np.broadcast_shapes(A.shape, B.shape)

    if t == 0.0:
        return np.broadcast_to(A, shape).copy()
    if t == 1.0:
        return np.broadcast_to(B, shape).copy()

    if A.ndim > 2 and B.ndim == 2:
        base, target, s = B, A, 1.0 - t
    else:
        base, target, s = A, B, t

    eps_pd = get_config().EPS_PD if eps_pd is None else eps_pd
    w, Q = _eigh(_symmetrize(base))
    base_sqrt = _apply_to_spectrum(w, Q, MatrixFunction.SQRT, None, eps_pd)
    base_isqrt = _apply_to_spectrum(w, Q, MatrixFunction.INV_SQRT, None, eps_pd)
    inner = _matfn(_congruence(base_isqrt, target), MatrixFunction.POWER, power=s, eps_pd=eps_pd)
    return _congruence(base_sqrt, inner)


def commutes(A, B, tol_commute: Optional[float] = None):
    """‖AB − BA‖_F <= tol · ‖A‖_F ‖B‖_F (elementwise over batches)."""
    tol_commute = get_config().TOL_COMMUTE if tol_commute is None else tol_commute
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    comm = np.linalg.norm(A @ B - B @ A, axis=(-2, -1))
    scale = np.linalg.norm(A, axis=(-2, -1)) * np.linalg.norm(B, axis=(-2, -1))
    return comm <= tol_commute * scale


def check_commuting(mats, tol_commute: Optional[float] = None) -> np.ndarray:
    """
    Verify that a family of matrices commutes pairwise.

    Returns:
        The family stacked into one array

    Raises:
        DomainError: Naming the first non-commuting pair
    """
    stack = _check_symmetric(np.stack([np.asarray(M, dtype=float) for M in mats]), "mats")
    n = stack.shape[0]
    for i in range(n - 1):
        ok = commutes(stack[i], stack[i + 1:], tol_commute)
        if not np.all(ok):
            j = i + 1 + int(np.argmin(ok))
            raise DomainError(f"Matrices {i} and {j} do not commute", field="mats")
    return stack


def commuting_barycenter(mats: Sequence, weights: Optional[Sequence[float]] = None,
                         tol_commute: Optional[float] = None) -> np.ndarray:
    """
    Barycenter of pairwise-commuting SPD matrices.

    Computed as exp(Σ w_k log A_k), which equals (A_1⋯A_n)^{1/n} for uniform
    weights when the matrices commute.

    Raises:
        DomainError: If the family does not commute or weights are invalid
    """
    if len(mats) == 0:
        raise DomainError("At least one matrix is required", field="mats")
    stack = check_commuting(mats, tol_commute)
    w = validate_weights(weights, stack.shape[0])
    logs = _matfn(stack, MatrixFunction.LOG)
    return _matfn(np.tensordot(w, logs, axes=(0, 0)), MatrixFunction.EXP)


def spectral_distance(A, B):
    """Largest singular value of A − B."""
    A = _check_square(A, "A")
    B = _check_square(B, "B")
    _check_same_dim(A, B)
    s = np.linalg.svd(A - B, compute_uv=False)[..., 0]
    return float(s) if np.ndim(s) == 0 else s


def random_spd(dim: int, condition_cap: float, rng: np.random.Generator) -> np.ndarray:
    """
    Random SPD matrix with condition number at most condition_cap.

    Eigenvalues are log-uniform in [cap^{-1/2}, cap^{1/2}], conjugated by a
    Haar-random orthogonal matrix.
    """
    if condition_cap < 1:
        raise DomainError(f"condition_cap must be >= 1, got {condition_cap}", field="condition_cap")
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}", field="dim")

    half_log = 0.5 * np.log(condition_cap)
    eigenvalues = np.exp(rng.uniform(-half_log, half_log, size=dim))
    if dim == 1:
        return eigenvalues.reshape(1, 1)
    Q = ortho_group.rvs(dim, random_state=rng)
    return _symmetrize((Q * eigenvalues) @ Q.T)


class SpdSpace(GeodesicSpace):
    """Affine-invariant SPD manifold of fixed dimension."""

    name = "spd"

    def __init__(self, dim: int, condition_cap: float = 100.0, tol_point: Optional[float] = None,
                 eps_pd: Optional[float] = None):
        """
        Args:
            dim: Matrix dimension
            condition_cap: Condition-number cap used by the sampler
            tol_point: Point equality tolerance
            eps_pd: Positivity threshold on eigenvalues
        """
        super().__init__(tol_point)
        if not 1 <= dim <= MAX_DIM:
            raise DomainError(f"dim must lie in [1, {MAX_DIM}], got {dim}", field="dim")
        self.dim = dim
        self.condition_cap = condition_cap
        self.eps_pd = get_config().EPS_PD if eps_pd is None else eps_pd

    def _check_dim(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=float)
        if A.shape[-2:] != (self.dim, self.dim):
            raise DomainError(f"Expected {self.dim}x{self.dim} matrices, got shape {A.shape}", field="point")
        return A

    def distance(self, x: Point, y: Point):
        return spd_distance(self._check_dim(x), self._check_dim(y), eps_pd=self.eps_pd)

    def interpolate(self, x: Point, y: Point, t: float) -> np.ndarray:
        return spd_interpolate(self._check_dim(x), self._check_dim(y), t, eps_pd=self.eps_pd)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return random_spd(self.dim, self.condition_cap, rng)
