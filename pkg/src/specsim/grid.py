"""Uniform-grid discretization of kernels and integral operators on [0, 1].

A function is represented by its values on the regular grid x_m = m/(M-1),
a kernel by the M x M matrix of its pointwise evaluations.  Integrals are
trapezoid sums, so an integral operator with kernel matrix K acts on a sample
vector v as K @ (w * v) with w the quadrature weights.  Spectral quantities
(eigenvalues, trace and Hilbert-Schmidt norms) are read off the symmetrically
weighted matrix W^{1/2} K W^{1/2}, which shares the operator's spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import NumericError

__all__ = [
    "Grid",
    "make_grid",
    "RealKernelMatrix",
    "ComplexOperatorMatrix",
    "EigenPairs",
    "discretize_kernel",
    "truncated_eigendecomposition",
    "solve_linear_system",
    "sherman_morrison_inverse_apply",
    "OperatorNorms",
    "operator_norms",
]

# Estimated 1-norm condition number past which linear solves are refused.
COND_LIMIT = 1e12


@dataclass(frozen=True)
class Grid:
    """Regular grid on [0, 1] with trapezoid quadrature weights."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def M(self) -> int:
        return self.points.size


def make_grid(M: int) -> Grid:
    """Build the M-point uniform grid; the weights sum to exactly 1."""
    if M < 2:
        raise ValueError(f"grid needs at least 2 points, got {M}")
    h = 1.0 / (M - 1)
    points = np.arange(M) * h
    weights = np.full(M, h)
    weights[0] = weights[-1] = h / 2
    points.flags.writeable = False
    weights.flags.writeable = False
    return Grid(points, weights)


@dataclass(frozen=True)
class RealKernelMatrix:
    """Pointwise evaluations of a real kernel on the grid."""

    grid: Grid
    values: np.ndarray


@dataclass(frozen=True)
class ComplexOperatorMatrix:
    """M x M complex matrix tied to a grid, e.g. a spectral density kernel."""

    grid: Grid
    values: np.ndarray


@dataclass(frozen=True)
class EigenPairs:
    """Leading eigenpairs of an integral operator.

    Rows of ``eigenfunctions`` are grid samples, orthonormal under the
    quadrature inner product sum_m w_m f(x_m) conj(g(x_m)).  ``clamped``
    counts eigenvalues that came out more negative than the clamping
    tolerance and were forced to zero.
    """

    grid: Grid
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    clamped: int = 0


def _matrix_of(op) -> tuple[np.ndarray, Grid]:
    if isinstance(op, (RealKernelMatrix, ComplexOperatorMatrix)):
        return op.values, op.grid
    raise TypeError(f"expected a kernel/operator matrix, got {type(op).__name__}")


def _weighted(values: np.ndarray, grid: Grid) -> np.ndarray:
    r = np.sqrt(grid.weights)
    return r[:, None] * values * r[None, :]


def discretize_kernel(fn: Callable, grid: Grid) -> RealKernelMatrix:
    """Sample a vectorized kernel fn(x, y) on the grid.

    Raises NumericError naming the first offending point if any value is
    not finite.
    """
    X, Y = np.meshgrid(grid.points, grid.points, indexing="ij")
    values = np.asarray(fn(X, Y), dtype=float)
    if values.shape != (grid.M, grid.M):
        values = np.broadcast_to(values, (grid.M, grid.M)).astype(float)
    bad = ~np.isfinite(values)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NumericError(
            "kernel is not finite at "
            f"(x, y) = ({grid.points[i]:.6g}, {grid.points[j]:.6g})"
        )
    return RealKernelMatrix(grid, values)


def truncated_eigendecomposition(op, N: int) -> EigenPairs:
    """Leading N eigenpairs of a Hermitian integral operator.

    The eigenproblem is solved for W^{1/2} K W^{1/2} and the eigenvectors are
    rescaled by W^{-1/2}, which makes them quadrature-orthonormal function
    samples.  Negative eigenvalues below -1e-10 * lambda_max are clamped to
    zero and counted; small negatives are clamped silently.
    """
    values, grid = _matrix_of(op)
    M = grid.M
    if not 1 <= N <= M:
        raise ValueError(f"need 1 <= N <= M, got N={N}, M={M}")
    scale = float(np.abs(values).max())
    if np.abs(values - values.conj().T).max() > 1e-8 * max(scale, 1e-300):
        raise ValueError("operator matrix is not Hermitian")
    B = _weighted(values, grid)
    B = (B + B.conj().T) / 2

    use_arpack = N <= M - 2 and M >= 256
    if use_arpack:
        try:
            w, U = scipy.sparse.linalg.eigsh(B, k=N, which="LA")
        except scipy.sparse.linalg.ArpackError:
            use_arpack = False
    if not use_arpack:
        w, U = np.linalg.eigh(B)
        w, U = w[-N:], U[:, -N:]
    order = np.argsort(w)[::-1]
    w, U = w[order], U[:, order]

    tol = 1e-10 * max(float(w[0]), 0.0)
    clamped = int(np.count_nonzero(w < -tol))
    w = np.where(w < 0.0, 0.0, w)
    functions = (U / np.sqrt(grid.weights)[:, None]).T
    return EigenPairs(grid, w, functions, clamped)


def solve_linear_system(A, b: np.ndarray) -> np.ndarray:
    """Solve A x = b with an explicit conditioning guard.

    A may be a ComplexOperatorMatrix or a plain square ndarray.  The system
    is LU-factored and the reciprocal 1-norm condition number estimated via
    LAPACK gecon; estimates past COND_LIMIT raise NumericError.
    """
    values = A.values if hasattr(A, "values") else np.asarray(A)
    values = np.asarray(values, dtype=complex)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"system matrix must be square, got shape {values.shape}")
    anorm = np.linalg.norm(values, 1)
    if not np.isfinite(anorm):
        raise NumericError("system matrix has non-finite entries")
    lu, piv = scipy.linalg.lu_factor(values, check_finite=False)
    (gecon,) = scipy.linalg.get_lapack_funcs(("gecon",), (lu,))
    rcond, _ = gecon(lu, anorm, norm="1")
    if not np.isfinite(rcond) or rcond < 1.0 / COND_LIMIT:
        raise NumericError(
            f"linear system is singular or ill-conditioned (rcond ~ {rcond:.2e})"
        )
    return scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=complex),
                                 check_finite=False)


def sherman_morrison_inverse_apply(
    c: complex,
    g: np.ndarray,
    gram: float,
    b: np.ndarray,
    grid: Grid,
) -> np.ndarray:
    """Apply (Id - c * g (x) g)^{-1} to b for a real function g.

    g (x) g is the rank-one integral operator v -> <v, g> g with the
    quadrature inner product; gram is <g, g>.  Raises NumericError within
    1e-12 of the resonance c * gram = 1.
    """
    denom = 1.0 - c * gram
    if abs(denom) < 1e-12:
        raise NumericError(
            f"rank-one resolvent at resonance: |1 - c <g, g>| = {abs(denom):.2e}"
        )
    inner = np.sum(grid.weights * g * b)
    return b + (c / denom) * inner * g


class OperatorNorms(NamedTuple):
    trace: float
    hilbert_schmidt: float


def operator_norms(op) -> OperatorNorms:
    """Trace (nuclear) and Hilbert-Schmidt norms of an integral operator."""
    values, grid = _matrix_of(op)
    B = _weighted(values, grid)
    s = np.linalg.svd(B, compute_uv=False)
    return OperatorNorms(float(s.sum()), float(np.linalg.norm(B)))
