"""Time-domain FARFIMA simulation.

Two routes around the spectral pipeline for FARFIMA specs:

* temporal_farfima runs the causal recursion directly: iid innovation
  curves, the MA filter, fractional integration as a truncated convolution
  with the (1 - z)^{-d} coefficients, then the AR recursion.  The
  convolution window grows with t, so the cost is O(T^2 M) for d != 0; the
  initial burn-in segment is discarded.
* hybrid_farfima simulates the AR-free part of the model spectrally at an
  extended length and applies only the AR recursion in the time domain,
  which keeps the cost loglinear in T while matching the AR transient
  behaviour of the temporal route.

The recursion loops are compiled with numba when it is available; plain
numpy fallbacks keep the module importable without it.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    njit = None

from .grid import Grid
from .spectra import CovarianceSpec, FarfimaSpec, farfima_operator_tables, noise_components
from .simulate_spectral import FtsSample, SimConfig, assemble_ensemble, synthesize
from .streams import NOISE, GaussianStream

__all__ = [
    "frac_coeffs",
    "default_burnin",
    "simulate_noise",
    "fractional_convolve",
    "temporal_farfima",
    "hybrid_farfima",
]


def frac_coeffs(d: float, count: int) -> np.ndarray:
    """First `count` power-series coefficients of (1 - z)^{-d}.

    c_0 = 1 and c_k = c_{k-1} (k - 1 + d) / k, which equals
    Gamma(k + d) / (Gamma(d) k!) without overflowing the gamma function.
    """
    if not abs(d) < 0.5:
        raise ValueError(f"memory parameter must satisfy |d| < 1/2, got {d}")
    if count < 1:
        raise ValueError(f"coefficient count must be positive, got {count}")
    k = np.arange(1, count, dtype=float)
    return np.concatenate(([1.0], np.cumprod((k - 1.0 + d) / k)))


def default_burnin(spec: FarfimaSpec) -> int:
    return 4 * max(spec.p, 50)


def simulate_noise(cov: CovarianceSpec, T: int, grid: Grid, N: int,
                   rng: np.random.Generator) -> np.ndarray:
    """T iid mean-zero Gaussian curves with the given covariance, truncated
    to its leading N components.  Row t is one curve on the grid."""
    if T < 1:
        raise ValueError(f"sample length must be positive, got {T}")
    values, functions = noise_components(cov, grid, N)
    scaled = np.sqrt(values)[:, None] * functions
    return rng.standard_normal((T, len(values))) @ scaled


# ---------------------------------------------------------------------------
# recursion kernels

def _frac_convolve_loops(coeffs, eta):
    K, M = eta.shape
    out = np.zeros((K, M))
    for t in range(K):
        for k in range(t + 1):
            ck = coeffs[k]
            s = t - k
            for m in range(M):
                out[t, m] += ck * eta[s, m]
    return out


def _ar_recurse_rank1_loops(coeffs, gs, wgs, rhs):
    K, M = rhs.shape
    p = coeffs.shape[0]
    out = np.zeros((K, M))
    for t in range(K):
        acc = rhs[t].copy()
        for j in range(p):
            s = t - 1 - j
            if s >= 0:
                acc += (coeffs[j] * (wgs[j] @ out[s])) * gs[j]
        out[t] = acc
    return out


def _ar_recurse_dense_loops(ops, rhs):
    K, M = rhs.shape
    p = ops.shape[0]
    out = np.zeros((K, M))
    for t in range(K):
        acc = rhs[t].copy()
        for j in range(p):
            s = t - 1 - j
            if s >= 0:
                acc += ops[j] @ out[s]
        out[t] = acc
    return out


if njit is not None:
    _frac_convolve_jit = njit(cache=True)(_frac_convolve_loops)
    _ar_recurse_rank1 = njit(cache=True)(_ar_recurse_rank1_loops)
    _ar_recurse_dense = njit(cache=True)(_ar_recurse_dense_loops)
else:  # pragma: no cover
    _frac_convolve_jit = None
    _ar_recurse_rank1 = _ar_recurse_rank1_loops
    _ar_recurse_dense = _ar_recurse_dense_loops


def fractional_convolve(coeffs: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Truncated fractional integration: out_t = sum_{k<=t} c_k eta_{t-k}."""
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    eta = np.ascontiguousarray(eta, dtype=float)
    if eta.ndim != 2:
        raise ValueError(f"expected a (T, M) sample array, got shape {eta.shape}")
    if len(coeffs) < eta.shape[0]:
        raise ValueError(f"need at least {eta.shape[0]} coefficients, got {len(coeffs)}")
    if _frac_convolve_jit is not None:
        return _frac_convolve_jit(coeffs, eta)
    out = np.empty_like(eta)  # pragma: no cover
    for t in range(eta.shape[0]):
        out[t] = coeffs[: t + 1] @ eta[t::-1]
    return out


def _ma_filter(spec: FarfimaSpec, eta: np.ndarray, grid: Grid) -> np.ndarray:
    """MA filter rows q..end of an innovation array that carries q lead-in
    rows, so every output row sees a full lag window."""
    q = spec.q
    out = eta[q:].copy()
    K = out.shape[0]
    _, ma_tables = farfima_operator_tables(spec, grid)
    for i, entry in enumerate(ma_tables, start=1):
        block = eta[q - i : q - i + K]
        if entry[0] == "rank1":
            _, c, gs, _ = entry
            out += (c * (block @ (grid.weights * gs)))[:, None] * gs[None, :]
        else:
            out += block @ entry[1].T
    return out


def _ar_recurse(spec: FarfimaSpec, rhs: np.ndarray, grid: Grid) -> np.ndarray:
    ar_tables, _ = farfima_operator_tables(spec, grid)
    if not ar_tables:
        return rhs
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if all(entry[0] == "rank1" for entry in ar_tables):
        coeffs = np.array([entry[1] for entry in ar_tables], dtype=float)
        gs = np.ascontiguousarray(np.vstack([entry[2] for entry in ar_tables]))
        wgs = np.ascontiguousarray(gs * grid.weights[None, :])
        return _ar_recurse_rank1(coeffs, gs, wgs, rhs)
    ops = np.empty((len(ar_tables), grid.M, grid.M))
    for j, entry in enumerate(ar_tables):
        if entry[0] == "rank1":
            _, c, g, _ = entry
            ops[j] = c * np.outer(g, grid.weights * g)
        else:
            ops[j] = entry[1]
    return _ar_recurse_dense(ops, rhs)


# ---------------------------------------------------------------------------
# public routes

def temporal_farfima(spec: FarfimaSpec, T: int, grid: Grid, N: int,
                     k_ma: int | None = None, burnin: int | None = None,
                     stream: GaussianStream | None = None) -> FtsSample:
    """Causal time-domain FARFIMA sample X_1..X_T.

    Runs the recursion for k_ma steps from a zero state and keeps the last
    T, so k_ma is both the truncation length of the fractional MA(infinity)
    window and the total recursion length.  It defaults to T + burnin and
    may not be shorter.  The MA filter sees q extra lead-in innovations, so
    only the fractional truncation and the AR start-up depend on the
    discarded prefix.
    """
    if not isinstance(spec, FarfimaSpec):
        raise TypeError(f"temporal route needs a FarfimaSpec, got {type(spec).__name__}")
    if T < 1:
        raise ValueError(f"sample length must be positive, got {T}")
    if burnin is None:
        burnin = default_burnin(spec)
    if burnin < 0:
        raise ValueError(f"burn-in must be nonnegative, got {burnin}")
    if stream is None:
        stream = GaussianStream(0)
    K = T + burnin if k_ma is None else k_ma
    if K < T + burnin:
        raise ValueError(f"k_ma must be at least T + burnin = {T + burnin}, got {K}")
    eta = simulate_noise(spec.noise, K + spec.q, grid, N, stream.generator(NOISE))
    zeta = _ma_filter(spec, eta, grid)
    if spec.d != 0.0:
        zeta = fractional_convolve(frac_coeffs(spec.d, K), zeta)
    x = _ar_recurse(spec, zeta, grid)
    return FtsSample(grid, np.ascontiguousarray(x[K - T :]), None, 0.0)


def hybrid_farfima(spec: FarfimaSpec, config: SimConfig, grid: Grid,
                   burnin: int | None = None,
                   workers: int | None = None) -> FtsSample:
    """FARFIMA sample via a spectral simulation of the AR-free part.

    The model with the AR polynomial removed is simulated spectrally at
    length T + burnin (rounded up to even), the AR recursion is applied in
    the time domain from a zero state, and the transient head is dropped.
    Deterministic in (seed, T, M, N) like the pure spectral route.
    """
    if not isinstance(spec, FarfimaSpec):
        raise TypeError(f"hybrid route needs a FarfimaSpec, got {type(spec).__name__}")
    if burnin is None:
        burnin = default_burnin(spec)
    if burnin < 0:
        raise ValueError(f"burn-in must be nonnegative, got {burnin}")
    T = config.T
    extended = T + burnin + (T + burnin) % 2
    base = FarfimaSpec(ar=(), d=spec.d, ma=spec.ma, noise=spec.noise)
    inner = replace(config, T=extended, oversample=1, method=None)
    sample = synthesize(assemble_ensemble(base, inner, grid, workers), inner)
    x = _ar_recurse(spec, sample.values, grid)
    return FtsSample(grid, np.ascontiguousarray(x[extended - T :]), config,
                     sample.imag_residual)
