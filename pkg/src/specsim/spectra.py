"""Spectral density operators of stationary functional time series.

A spectral density assigns to each frequency omega in [0, 2pi] a trace-class
positive operator on L^2[0, 1], Hermitian-symmetric about pi in the sense
F(2pi - omega) = conj(F(omega)).  Four descriptions are supported:

* EigenSpec      -- analytic eigenvalues/eigenfunctions lambda_n(omega),
                    phi_n(omega).
* FilterSpec     -- F = (2pi)^{-1} Theta(omega) S Theta(omega)^* for a
                    frequency response Theta and innovation covariance S.
* FarfimaSpec    -- closed form of a (fractionally integrated) functional
                    ARMA process: F = (2pi)^{-1} [2 sin(omega/2)]^{-2d}
                    A^{-1} B S B^* A^{-*} with operator polynomials
                    A(z) = Id - A_1 z - ... - A_p z^p and
                    B(z) = Id + B_1 z + ... + B_q z^q evaluated at
                    z = exp(-i omega).
* KernelSpec     -- kernel values f_omega(x, y) given directly.

Autocovariances follow by Fourier inversion, R_h = integral of
F(omega) exp(i h omega) d omega, computed here by the midpoint rule, which
never touches the endpoint singularity a positive memory parameter d puts
at omega in {0, 2pi}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import NumericError, SingularFrequencyError
from .grid import (
    ComplexOperatorMatrix,
    Grid,
    RealKernelMatrix,
    discretize_kernel,
    sherman_morrison_inverse_apply,
    solve_linear_system,
    truncated_eigendecomposition,
)

__all__ = [
    "ClosedFormKernel",
    "MercerSeries",
    "LowRankSum",
    "CovarianceSpec",
    "noise_components",
    "covariance_kernel_matrix",
    "EigenSpec",
    "IdentityResponse",
    "RankOneResponse",
    "ScaledKernelResponse",
    "FilterSpec",
    "RankOneKernel",
    "FarfimaSpec",
    "KernelSpec",
    "SpectralDensitySpec",
    "fractional_factor",
    "farfima_frequency_response",
    "farfima_stationarity_diagnostic",
    "eval_spectral_density",
    "true_autocovariance",
    "true_autocovariances",
    "finite_T_target_covariance",
    "finite_T_target_covariances",
    "circle_shift",
    "builtin_specs",
    "validate_spec",
]

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# innovation covariance operators

@dataclass(frozen=True)
class ClosedFormKernel:
    """Covariance given by a symmetric PSD kernel fn(x, y); components are
    recovered numerically when needed."""

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MercerSeries:
    """Covariance sum_n eta_n e_n (x) e_n with analytic components.

    eigenvalue(n) = eta_n (n >= 1, nonnegative), function(n, x) = samples of
    e_n.  n_max bounds the component budget; None means unbounded, callers
    truncate.
    """

    eigenvalue: Callable[[int], float]
    function: Callable[[int, np.ndarray], np.ndarray]
    n_max: int | None = None

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError(f"n_max must be positive, got {self.n_max}")


@dataclass(frozen=True)
class LowRankSum:
    """Covariance sum_r sigma_r f_r (x) f_r with finitely many components.

    The component functions need not be orthonormal; the coefficients must be
    nonnegative.
    """

    coefficients: tuple[float, ...]
    functions: tuple[Callable[[np.ndarray], np.ndarray], ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.coefficients) != len(self.functions):
            raise ValueError("coefficients and functions must pair up")
        if not self.coefficients:
            raise ValueError("low-rank covariance needs at least one component")
        if any(c < 0 for c in self.coefficients):
            raise ValueError("covariance coefficients must be nonnegative")


CovarianceSpec = Union[ClosedFormKernel, MercerSeries, LowRankSum]


def noise_components(cov: CovarianceSpec, grid: Grid, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Leading components (variances, function samples) of a covariance.

    Returns at most N components; MercerSeries and LowRankSum stop earlier at
    their own budgets, ClosedFormKernel at the grid size.  Results are cached
    per (covariance, grid, N).
    """
    if N < 1:
        raise ValueError(f"component count must be positive, got {N}")
    return _noise_components(cov, grid.points.tobytes(), grid.weights.tobytes(), N)


@lru_cache(maxsize=128)
def _noise_components(cov, points_key: bytes, weights_key: bytes, N: int):
    grid = Grid(np.frombuffer(points_key), np.frombuffer(weights_key))
    if isinstance(cov, ClosedFormKernel):
        pairs = truncated_eigendecomposition(discretize_kernel(cov.fn, grid), min(N, grid.M))
        return pairs.eigenvalues, pairs.eigenfunctions
    if isinstance(cov, MercerSeries):
        R = N if cov.n_max is None else min(N, cov.n_max)
        values = np.array([float(cov.eigenvalue(n)) for n in range(1, R + 1)])
        if (values < 0).any():
            n_bad = int(np.argmax(values < 0)) + 1
            raise ValueError(f"Mercer eigenvalue {n_bad} is negative: {values[n_bad - 1]!r}")
        functions = np.vstack([np.asarray(cov.function(n, grid.points), dtype=float)
                               for n in range(1, R + 1)])
        return values, functions
    if isinstance(cov, LowRankSum):
        R = min(N, len(cov.coefficients))
        values = np.array(cov.coefficients[:R])
        functions = np.vstack([np.asarray(f(grid.points), dtype=float)
                               for f in cov.functions[:R]])
        return values, functions
    raise TypeError(f"unknown covariance spec {type(cov).__name__}")


def covariance_kernel_matrix(cov: CovarianceSpec, grid: Grid, N: int | None = None) -> RealKernelMatrix:
    """Kernel values of a covariance; series forms are truncated at N."""
    if isinstance(cov, ClosedFormKernel):
        return discretize_kernel(cov.fn, grid)
    budget = _covariance_budget(cov, grid) if N is None else N
    values, functions = noise_components(cov, grid, budget)
    K = (values[:, None] * functions).T @ functions
    return RealKernelMatrix(grid, K)


def _covariance_budget(cov: CovarianceSpec, grid: Grid) -> int:
    if isinstance(cov, MercerSeries):
        return cov.n_max if cov.n_max is not None else 1000
    if isinstance(cov, LowRankSum):
        return len(cov.coefficients)
    return grid.M


# ---------------------------------------------------------------------------
# spectral density descriptions

@dataclass(frozen=True)
class EigenSpec:
    """Spectral density from analytic eigenpairs.

    eigenvalue(n, omega) and eigenfunction(n, omega, x) describe the n-th
    (1-based) eigenpair of F(omega); the eigenfunctions are real-valued and
    orthonormal for each omega.  The optional *_block hooks evaluate a whole
    range of components at once, (ns, omega[, x]) -> stacked rows, and are
    used by the simulation hot path when present.
    """

    eigenvalue: Callable[[int, float], float]
    eigenfunction: Callable[[int, float, np.ndarray], np.ndarray]
    n_max: int | None = None
    eigenvalue_block: Callable[[np.ndarray, float], np.ndarray] | None = None
    eigenfunction_block: Callable[[np.ndarray, float, np.ndarray], np.ndarray] | None = None


class IdentityResponse:
    """Frequency response Theta(omega) = Id."""

    def action_matrix(self, omega: float, grid: Grid) -> np.ndarray:
        return np.eye(grid.M, dtype=complex)

    def apply(self, omega: float, grid: Grid, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec, dtype=complex)

    def __hash__(self):
        return hash(IdentityResponse)

    def __eq__(self, other):
        return isinstance(other, IdentityResponse)


@dataclass(frozen=True)
class RankOneResponse:
    """Frequency response Theta(omega) = c(omega) * g (x) g."""

    scale: Callable[[float], complex]
    g: Callable[[np.ndarray], np.ndarray]

    def action_matrix(self, omega, grid):
        gs = np.asarray(self.g(grid.points), dtype=float)
        return complex(self.scale(omega)) * np.outer(gs, grid.weights * gs)

    def apply(self, omega, grid, vec):
        gs = np.asarray(self.g(grid.points), dtype=float)
        return complex(self.scale(omega)) * np.sum(grid.weights * gs * vec) * gs


@dataclass(frozen=True)
class ScaledKernelResponse:
    """Frequency response Theta(omega) = s(omega) * integral operator."""

    scale: Callable[[float], complex]
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def action_matrix(self, omega, grid):
        K = discretize_kernel(self.kernel, grid).values
        return complex(self.scale(omega)) * (K * grid.weights[None, :])

    def apply(self, omega, grid, vec):
        K = discretize_kernel(self.kernel, grid).values
        return complex(self.scale(omega)) * (K @ (grid.weights * vec))


@dataclass(frozen=True)
class FilterSpec:
    """Density (2pi)^{-1} Theta(omega) S Theta(omega)^*.

    response is one of the structured forms above or a plain callable
    (omega, grid) -> M x M complex action matrix (the identity part, if any,
    included).  It must satisfy Theta(2pi - omega) = conj(Theta(omega)).
    """

    response: object
    noise: CovarianceSpec


@dataclass(frozen=True)
class RankOneKernel:
    """Kernel c * g(x) g(y), tagged so resolvents use the rank-one fast path."""

    c: float
    g: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FarfimaSpec:
    """Functional ARFIMA(p, d, q): AR kernels, memory parameter, MA kernels,
    innovation covariance.  d = 0 gives plain functional ARMA; |d| < 1/2."""

    ar: tuple = ()
    d: float = 0.0
    ma: tuple = ()
    noise: CovarianceSpec = None

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(self.ar))
        object.__setattr__(self, "ma", tuple(self.ma))
        if not abs(self.d) < 0.5:
            raise ValueError(f"memory parameter must satisfy |d| < 1/2, got {self.d}")
        if self.noise is None:
            raise ValueError("FarfimaSpec needs an innovation covariance")

    @property
    def p(self) -> int:
        return len(self.ar)

    @property
    def q(self) -> int:
        return len(self.ma)


@dataclass(frozen=True)
class KernelSpec:
    """Spectral density given directly as kernel values fn(omega, X, Y)."""

    fn: Callable[[float, np.ndarray, np.ndarray], np.ndarray]


SpectralDensitySpec = Union[EigenSpec, FilterSpec, FarfimaSpec, KernelSpec]


# ---------------------------------------------------------------------------
# fractional integration factor

def fractional_factor(omega: float, d: float) -> float:
    """Long-memory spectral factor [2 sin(omega/2)]^{-2d} on [0, 2pi].

    Symmetric about pi.  At the endpoints the factor diverges (d > 0) or
    degenerates (d < 0); both raise SingularFrequencyError for d != 0.
    """
    if not 0.0 <= omega <= TWO_PI:
        raise ValueError(f"frequency must lie in [0, 2pi], got {omega}")
    if omega == 0.0 or omega == TWO_PI:
        if d != 0.0:
            raise SingularFrequencyError(
                f"fractional factor undefined at omega = {omega} for d = {d}"
            )
        return 1.0
    return float((2.0 * np.sin(omega / 2.0)) ** (-2.0 * d))


def _fractional_half_factor(omega: float, d: float) -> float:
    """[2 sin(omega/2)]^{-d} with endpoint limits: 1 for d = 0, 0 for d < 0;
    raises for d > 0 where the factor diverges."""
    if omega == 0.0 or omega == TWO_PI:
        if d > 0.0:
            raise SingularFrequencyError(
                f"spectral density diverges at omega = {omega} for d = {d}"
            )
        return 1.0 if d == 0.0 else 0.0
    return float((2.0 * np.sin(omega / 2.0)) ** (-d))


# ---------------------------------------------------------------------------
# FARFIMA plumbing: discretized operator tables, resolvent application

def _response_action_matrix(response, omega: float, grid: Grid) -> np.ndarray:
    if hasattr(response, "action_matrix"):
        return np.asarray(response.action_matrix(omega, grid), dtype=complex)
    out = np.asarray(response(omega, grid), dtype=complex)
    if out.shape != (grid.M, grid.M):
        raise ValueError(f"response matrix has shape {out.shape}, expected {(grid.M,) * 2}")
    return out


def _response_apply(response, omega: float, grid: Grid, vec: np.ndarray) -> np.ndarray:
    if hasattr(response, "apply"):
        return np.asarray(response.apply(omega, grid, vec), dtype=complex)
    return _response_action_matrix(response, omega, grid) @ np.asarray(vec, dtype=complex)


def farfima_operator_tables(spec: FarfimaSpec, grid: Grid):
    """Grid data for the AR and MA operators of a FARFIMA spec.

    Each entry is ("rank1", c, g samples, <g, g>) or ("dense", K W) with K
    the discretized kernel; cached per (spec, grid).
    """
    return _farfima_tables(spec, grid.points.tobytes(), grid.weights.tobytes())


@lru_cache(maxsize=64)
def _farfima_tables(spec: FarfimaSpec, points_key: bytes, weights_key: bytes):
    grid = Grid(np.frombuffer(points_key), np.frombuffer(weights_key))

    def table(kernel):
        if isinstance(kernel, RankOneKernel):
            gs = np.asarray(kernel.g(grid.points), dtype=float)
            gram = float(np.sum(grid.weights * gs * gs))
            return ("rank1", kernel.c, gs, gram)
        K = discretize_kernel(kernel, grid).values
        return ("dense", K * grid.weights[None, :])

    return tuple(table(k) for k in spec.ar), tuple(table(k) for k in spec.ma)


def _polynomial_action_matrix(tables, omega: float, grid: Grid, sign: float) -> np.ndarray:
    """Action matrix of Id + sign * sum_j z^j Op_j at z = exp(-i omega)."""
    out = np.eye(grid.M, dtype=complex)
    for j, entry in enumerate(tables, start=1):
        z = np.exp(-1j * j * omega)
        if entry[0] == "rank1":
            _, c, gs, _ = entry
            out += (sign * c * z) * np.outer(gs, grid.weights * gs)
        else:
            out += (sign * z) * entry[1]
    return out


def _ma_apply(tables, omega: float, grid: Grid, vec: np.ndarray) -> np.ndarray:
    out = np.asarray(vec, dtype=complex).copy()
    for j, entry in enumerate(tables, start=1):
        z = np.exp(-1j * j * omega)
        if entry[0] == "rank1":
            _, c, gs, _ = entry
            out += (c * z) * np.sum(grid.weights * gs * vec) * gs
        else:
            out += z * (entry[1] @ vec)
    return out


def _ar_solve(ar_tables, omega: float, grid: Grid, rhs: np.ndarray) -> np.ndarray:
    """Apply A(exp(-i omega))^{-1} to a vector or matrix of columns."""
    if not ar_tables:
        return np.asarray(rhs, dtype=complex)
    if len(ar_tables) == 1 and ar_tables[0][0] == "rank1":
        _, c, gs, gram = ar_tables[0]
        scale = c * np.exp(-1j * omega)
        if rhs.ndim == 1:
            return sherman_morrison_inverse_apply(scale, gs, gram, rhs, grid)
        denom = 1.0 - scale * gram
        if abs(denom) < 1e-12:
            raise NumericError(
                f"rank-one resolvent at resonance: |1 - c <g, g>| = {abs(denom):.2e}")
        inner = (grid.weights * gs) @ rhs
        return rhs + (scale / denom) * np.outer(gs, inner)
    A = _polynomial_action_matrix(ar_tables, omega, grid, sign=-1.0)
    return solve_linear_system(A, rhs)


def farfima_frequency_response(spec: FarfimaSpec, omega: float, grid: Grid,
                               vec: np.ndarray) -> np.ndarray:
    """Apply the response [2 sin(omega/2)]^{-d} A(e^{-i omega})^{-1}
    B(e^{-i omega}) to a sample vector.

    Spectral atoms are (2pi)^{-1/2} times this applied to an innovation
    draw.  Rank-one tagged AR kernels at p = 1 use the Sherman-Morrison
    fast path; anything else goes through a dense solve with a conditioning
    guard.
    """
    if not 0.0 <= omega <= TWO_PI:
        raise ValueError(f"frequency must lie in [0, 2pi], got {omega}")
    half = _fractional_half_factor(omega, spec.d)
    if half == 0.0:
        return np.zeros(grid.M, dtype=complex)
    ar_tables, ma_tables = farfima_operator_tables(spec, grid)
    out = _ma_apply(ma_tables, omega, grid, np.asarray(vec, dtype=complex))
    out = _ar_solve(ar_tables, omega, grid, out)
    return out * half


def farfima_stationarity_diagnostic(spec: FarfimaSpec, grid: Grid) -> float:
    """Spectral radius of the discretized AR companion matrix.

    Values below 1 indicate the AR recursion is stable on this grid.  This is
    a grid-level diagnostic, not a proof about the underlying operators.
    """
    p = spec.p
    if p == 0:
        return 0.0
    M = grid.M
    ar_tables, _ = farfima_operator_tables(spec, grid)
    blocks = []
    for entry in ar_tables:
        if entry[0] == "rank1":
            _, c, gs, _ = entry
            blocks.append(c * np.outer(gs, grid.weights * gs))
        else:
            blocks.append(entry[1])
    companion = np.zeros((p * M, p * M))
    companion[:M] = np.hstack(blocks)
    if p > 1:
        companion[M:, :-M] = np.eye((p - 1) * M)
    return float(np.abs(np.linalg.eigvals(companion)).max())


# ---------------------------------------------------------------------------
# pointwise evaluation

def eval_spectral_density(spec: SpectralDensitySpec, omega: float, grid: Grid,
                          N: int | None = None) -> ComplexOperatorMatrix:
    """Kernel values of F(omega) on the grid.

    N truncates series representations (eigen sums, Mercer noise); closed
    forms ignore it.  For FarfimaSpec with d > 0 the endpoints omega in
    {0, 2pi} raise SingularFrequencyError; with d < 0 the density vanishes
    there.
    """
    if not 0.0 <= omega <= TWO_PI:
        raise ValueError(f"frequency must lie in [0, 2pi], got {omega}")

    if isinstance(spec, EigenSpec):
        R = N if N is not None else (spec.n_max or 1000)
        if spec.n_max is not None:
            R = min(R, spec.n_max)
        lam, phi = _eigen_rows(spec, omega, grid, R)
        F = (lam[:, None] * phi).T.astype(complex) @ phi
        return ComplexOperatorMatrix(grid, F)

    if isinstance(spec, FilterSpec):
        ks = covariance_kernel_matrix(spec.noise, grid, N).values
        theta = _response_action_matrix(spec.response, omega, grid)
        F = theta @ ks.astype(complex) @ theta.conj().T / TWO_PI
        return ComplexOperatorMatrix(grid, F)

    if isinstance(spec, FarfimaSpec):
        half = _fractional_half_factor(omega, spec.d)
        if half == 0.0:
            return ComplexOperatorMatrix(grid, np.zeros((grid.M, grid.M), dtype=complex))
        ks = covariance_kernel_matrix(spec.noise, grid, N).values
        ar_tables, ma_tables = farfima_operator_tables(spec, grid)
        B = _polynomial_action_matrix(ma_tables, omega, grid, sign=1.0)
        F = B @ ks.astype(complex) @ B.conj().T
        F = _ar_solve(ar_tables, omega, grid, F)
        F = _ar_solve(ar_tables, omega, grid, F.conj().T).conj().T
        return ComplexOperatorMatrix(grid, F * (half * half / TWO_PI))

    if isinstance(spec, KernelSpec):
        X, Y = np.meshgrid(grid.points, grid.points, indexing="ij")
        F = np.asarray(spec.fn(omega, X, Y), dtype=complex)
        return ComplexOperatorMatrix(grid, F)

    raise TypeError(f"unknown spectral density spec {type(spec).__name__}")


def _eigen_rows(spec: EigenSpec, omega: float, grid: Grid, R: int):
    ns = np.arange(1, R + 1)
    if spec.eigenvalue_block is not None:
        lam = np.asarray(spec.eigenvalue_block(ns, omega), dtype=float)
    else:
        lam = np.array([float(spec.eigenvalue(int(n), omega)) for n in ns])
    if (lam < 0).any():
        n_bad = int(np.argmax(lam < 0)) + 1
        raise ValueError(
            f"eigenvalue {n_bad} at omega = {omega:.6g} is negative: {lam[n_bad - 1]!r}"
        )
    if spec.eigenfunction_block is not None:
        phi = np.asarray(spec.eigenfunction_block(ns, omega, grid.points), dtype=float)
    else:
        phi = np.vstack([np.asarray(spec.eigenfunction(int(n), omega, grid.points), dtype=float)
                         for n in ns])
    return lam, phi


# ---------------------------------------------------------------------------
# autocovariance targets

def _collect_transform(spec, lags, grid, omegas, weight, N):
    acc = {h: np.zeros((grid.M, grid.M), dtype=complex) for h in lags}
    mass = 0.0
    for omega in omegas:
        F = eval_spectral_density(spec, float(omega), grid, N).values
        mass += float(np.abs(F).max())
        for h in lags:
            acc[h] += F * np.exp(1j * h * omega)
    out = {}
    # nonzero lags of a flat density cancel to zero, so the imaginary-part
    # check is measured against the integrated density mass, not the result
    scale = max(mass * weight, 1e-300)
    for h in lags:
        R = acc[h] * weight
        if np.abs(R.imag).max() > 1e-8 * scale:
            raise NumericError(
                f"autocovariance at lag {h} has a non-negligible imaginary part; "
                "the spectral density breaks Hermitian frequency symmetry"
            )
        out[h] = RealKernelMatrix(grid, np.ascontiguousarray(R.real))
    return out


def true_autocovariances(spec: SpectralDensitySpec, lags, grid: Grid,
                         n_freq: int = 2048, N: int | None = None):
    """Lag-h autocovariance kernels by midpoint-rule Fourier inversion.

    Returns {h: RealKernelMatrix}.  The midpoint rule avoids the endpoints,
    so long-memory densities integrate without special casing.
    """
    if n_freq < 64:
        raise ValueError(f"need n_freq >= 64 quadrature nodes, got {n_freq}")
    lags = tuple(int(h) for h in lags)
    step = TWO_PI / n_freq
    omegas = (np.arange(n_freq) + 0.5) * step
    return _collect_transform(spec, lags, grid, omegas, step, N)


def true_autocovariance(spec: SpectralDensitySpec, h: int, grid: Grid,
                        n_freq: int = 2048, N: int | None = None) -> RealKernelMatrix:
    """Single-lag convenience wrapper around true_autocovariances."""
    return true_autocovariances(spec, (h,), grid, n_freq, N)[h]


def finite_T_target_covariances(spec: SpectralDensitySpec, lags, grid: Grid,
                                T: int, N: int | None = None):
    """Exact lag-h covariances of the length-T spectral construction.

    E[X_{t+h} (x) X_t] = (2pi/T) sum_{k=1}^{T} F(2pi k / T) exp(i h 2pi k/T);
    for FARFIMA with d != 0 the k = T term is zero (convention at the
    endpoint for d > 0, exact limit for d < 0).
    """
    if T < 2 or T % 2:
        raise ValueError(f"T must be even and >= 2, got {T}")
    lags = tuple(int(h) for h in lags)
    ks = np.arange(1, T + 1)
    if isinstance(spec, FarfimaSpec) and spec.d != 0.0:
        ks = ks[:-1]
    omegas = TWO_PI * ks / T
    return _collect_transform(spec, lags, grid, omegas, TWO_PI / T, N)


def finite_T_target_covariance(spec: SpectralDensitySpec, h: int, grid: Grid,
                               T: int, N: int | None = None) -> RealKernelMatrix:
    """Single-lag convenience wrapper around finite_T_target_covariances."""
    return finite_T_target_covariances(spec, (h,), grid, T, N)[h]


# ---------------------------------------------------------------------------
# built-in specs

def circle_shift(x, a):
    """Wrap-around shift (x - a) mod 1 on the unit circle."""
    return np.mod(np.asarray(x, dtype=float) - a, 1.0)


def _shift_anchor(omega: float) -> float:
    # traveling anchor of the shifted sine basis: omega/pi on [0, pi],
    # -omega/pi on (pi, 2pi]; the two branches agree with conjugate symmetry
    return omega / np.pi if omega <= np.pi else -omega / np.pi


def _shifted_sine_lambda(n: int, omega: float) -> float:
    return 1.0 / ((1.0 - 0.9 * np.cos(omega)) * np.pi**2 * n**2)


def _shifted_sine_lambda_block(ns: np.ndarray, omega: float) -> np.ndarray:
    return 1.0 / ((1.0 - 0.9 * np.cos(omega)) * np.pi**2 * ns.astype(float) ** 2)


def _shifted_sine_phi(n: int, omega: float, x: np.ndarray) -> np.ndarray:
    u = circle_shift(x, _shift_anchor(omega))
    return np.sqrt(2.0) * np.sin(n * np.pi * u)


def _shifted_sine_phi_block(ns: np.ndarray, omega: float, x: np.ndarray) -> np.ndarray:
    u = circle_shift(x, _shift_anchor(omega))
    return np.sqrt(2.0) * np.sin(np.pi * np.outer(ns.astype(float), u))


def shifted_sine_spec() -> EigenSpec:
    """Traveling Brownian-bridge spectrum: lambda_n(omega) proportional to
    1/n^2 with an AR(1)-like frequency profile, eigenfunctions sqrt(2)
    sin(n pi u) in the shifted coordinate u = (x - a(omega)) mod 1."""
    return EigenSpec(
        eigenvalue=_shifted_sine_lambda,
        eigenfunction=_shifted_sine_phi,
        n_max=None,
        eigenvalue_block=_shifted_sine_lambda_block,
        eigenfunction_block=_shifted_sine_phi_block,
    )


def _shifted_sine_kernel(omega: float, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    u = circle_shift(X, _shift_anchor(omega))
    v = circle_shift(Y, _shift_anchor(omega))
    return (np.minimum(u, v) - u * v) / (1.0 - 0.9 * np.cos(omega))


def shifted_sine_kernel_spec() -> KernelSpec:
    """Closed kernel form of the traveling Brownian-bridge spectrum."""
    return KernelSpec(_shifted_sine_kernel)


def _bm_eta(n: int) -> float:
    return 1.0 / (((n - 0.5) * np.pi) ** 2)


def _bm_e(n: int, x: np.ndarray) -> np.ndarray:
    return np.sqrt(2.0) * np.sin((n - 0.5) * np.pi * x)


def brownian_motion_covariance(form: str = "series") -> CovarianceSpec:
    """Brownian-motion covariance min(x, y), as an analytic Mercer series or
    as a closed-form kernel decomposed numerically."""
    if form == "series":
        return MercerSeries(eigenvalue=_bm_eta, function=_bm_e, n_max=None)
    if form == "kernel":
        return ClosedFormKernel(lambda x, y: np.minimum(x, y))
    raise ValueError(f"unknown covariance form {form!r}")


def _gauss_bump(x: np.ndarray) -> np.ndarray:
    return np.exp(x**2 / 2.0)


def long_memory_far_spec(noise_form: str = "series") -> FarfimaSpec:
    """FARFIMA(1, 0.2, 0): rank-one AR kernel 0.34 exp((x^2 + y^2)/2) and
    Brownian-motion innovations."""
    return FarfimaSpec(
        ar=(RankOneKernel(0.34, _gauss_bump),),
        d=0.2,
        ma=(),
        noise=brownian_motion_covariance(noise_form),
    )


_TRIG_COEFFS = (1.0, 0.6, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05)


def _trig_pair(freq: int):
    def fsin(x, k=freq):
        return np.sin(k * np.pi * x)

    def fcos(x, k=freq):
        return np.cos(k * np.pi * x)

    return fsin, fcos


_TRIG_FUNCS = tuple(f for k in (2, 4, 6, 8, 10) for f in _trig_pair(k))


def trig_noise_covariance(form: str = "lowrank") -> CovarianceSpec:
    """Rank-10 trigonometric covariance used by the FARMA(4, 3) example."""
    if form == "lowrank":
        return LowRankSum(_TRIG_COEFFS, _TRIG_FUNCS)
    if form == "kernel":
        def kernel(x, y):
            out = np.zeros(np.broadcast(x, y).shape)
            for c, f in zip(_TRIG_COEFFS, _TRIG_FUNCS):
                out = out + c * f(x) * f(y)
            return out

        return ClosedFormKernel(kernel)
    raise ValueError(f"unknown covariance form {form!r}")


def _farma_a1(x, y):
    return 0.3 * np.sin(x - y)


def _farma_a2(x, y):
    return 0.3 * np.cos(x - y)


def _farma_a3(x, y):
    return 0.3 * np.sin(2 * x) + 0.0 * y


def _farma_a4(x, y):
    return 0.3 * np.cos(y) + 0.0 * x


def _farma_b1(x, y):
    return x + y


def _farma_b2(x, y):
    return x + 0.0 * y


def _farma_b3(x, y):
    return y + 0.0 * x


def smooth_farma_spec(noise_form: str = "lowrank") -> FarfimaSpec:
    """FARMA(4, 3) with smooth trigonometric/polynomial kernels and the
    rank-10 trigonometric innovation covariance."""
    return FarfimaSpec(
        ar=(_farma_a1, _farma_a2, _farma_a3, _farma_a4),
        d=0.0,
        ma=(_farma_b1, _farma_b2, _farma_b3),
        noise=trig_noise_covariance(noise_form),
    )


def white_noise_spec() -> FarfimaSpec:
    """Degenerate FARFIMA(0, 0, 0): iid Brownian-motion innovations, flat
    spectral density S/(2pi)."""
    return FarfimaSpec(ar=(), d=0.0, ma=(), noise=brownian_motion_covariance("series"))


def builtin_specs() -> dict[str, SpectralDensitySpec]:
    """Named specs used across the docs, CLI, and test suite."""
    return {
        "example1": shifted_sine_spec(),
        "example1-kernel": shifted_sine_kernel_spec(),
        "example2": long_memory_far_spec("series"),
        "example3": smooth_farma_spec("lowrank"),
        "white-noise": white_noise_spec(),
    }


# ---------------------------------------------------------------------------
# spec-level sanity checks

def validate_spec(spec: SpectralDensitySpec, grid: Grid, n_samples: int = 7) -> list[str]:
    """Check spec invariants on sampled frequencies.

    Hard violations (negative eigenvalues, a response breaking conjugate
    symmetry, non-Hermitian kernel values) raise ValueError.  Soft findings,
    e.g. an AR companion spectral radius at or above 1, are returned as
    human-readable strings.
    """
    findings: list[str] = []
    omegas = (np.arange(n_samples) + 0.5) * TWO_PI / n_samples

    if isinstance(spec, EigenSpec):
        for omega in omegas:
            _eigen_rows(spec, float(omega), grid, min(8, spec.n_max or 8))
    elif isinstance(spec, FilterSpec):
        for omega in omegas[: (n_samples + 1) // 2]:
            a = _response_action_matrix(spec.response, float(omega), grid)
            b = _response_action_matrix(spec.response, float(TWO_PI - omega), grid)
            scale = max(float(np.abs(a).max()), 1e-300)
            if np.abs(b - a.conj()).max() > 1e-8 * scale:
                raise ValueError(
                    f"response breaks conjugate symmetry at omega = {omega:.6g}"
                )
        noise_components(spec.noise, grid, 8)
    elif isinstance(spec, FarfimaSpec):
        noise_components(spec.noise, grid, 8)
        radius = farfima_stationarity_diagnostic(spec, grid)
        if radius >= 1.0:
            findings.append(
                f"AR companion spectral radius is {radius:.4f} >= 1; "
                "the recursion may be nonstationary"
            )
    elif isinstance(spec, KernelSpec):
        for omega in omegas[: (n_samples + 1) // 2]:
            F = eval_spectral_density(spec, float(omega), grid).values
            G = eval_spectral_density(spec, float(TWO_PI - omega), grid).values
            scale = max(float(np.abs(F).max()), 1e-300)
            if np.abs(F - F.conj().T).max() > 1e-8 * scale:
                raise ValueError(f"kernel values not Hermitian at omega = {omega:.6g}")
            if np.abs(G - F.conj()).max() > 1e-8 * scale:
                raise ValueError(
                    f"kernel breaks conjugate frequency symmetry at omega = {omega:.6g}"
                )
    else:
        raise TypeError(f"unknown spectral density spec {type(spec).__name__}")
    return findings
