"""Spectral-domain simulation of stationary Gaussian functional time series.

The pipeline has two steps.  First an ensemble of independent complex
Gaussian frequency atoms Z_k is drawn, one per canonical frequency
omega_k = 2 pi k / T, with E[Z'_k (x) Z'_k] = F(omega_k) and the conjugate
symmetry Z_{T-k} = conj(Z_k) wired in.  Second the atoms are synthesized by
an inverse FFT,

    X_t = (pi / T)^{1/2} sum_{k=1}^{T} Z_k exp(i t omega_k),  t = 1..T,

which is real up to rounding and costs O(M T log T).  The exact second-order
structure of the output is the finite-T target covariance
(2 pi / T) sum_k F(omega_k) exp(i h omega_k), which converges to the true
autocovariance as T grows.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, make_grid, truncated_eigendecomposition, ComplexOperatorMatrix
from .spectra import (
    EigenSpec,
    FarfimaSpec,
    FilterSpec,
    KernelSpec,
    SpectralDensitySpec,
    _eigen_rows,
    _fractional_half_factor,
    _ma_apply,
    _ar_solve,
    _response_apply,
    eval_spectral_density,
    farfima_operator_tables,
    noise_components,
)
from .streams import ATOM_IMAG, ATOM_REAL, OFFSET, GaussianStream

__all__ = [
    "SimConfig",
    "FrequencyEnsemble",
    "FtsSample",
    "METHODS",
    "default_method",
    "resolve_workers",
    "draw_atom_ckl",
    "draw_atom_filter",
    "draw_atom_farfima",
    "assemble_ensemble",
    "synthesize",
    "simulate",
]

TWO_PI = 2.0 * np.pi

METHODS = ("ckl", "filter", "farfima-spectral", "farfima-hybrid", "temporal")


@dataclass(frozen=True)
class SimConfig:
    """Simulation request: sample length T (even), grid size M, series
    truncation N, seed, oversampling factor, and method tag (None picks the
    natural method for the spec)."""

    T: int
    M: int
    N: int
    seed: int = 0
    oversample: int = 1
    method: str | None = None

    def __post_init__(self):
        if self.T < 2 or self.T % 2:
            raise ValueError(f"T must be even and >= 2, got {self.T}")
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.oversample < 1:
            raise ValueError(f"oversample must be >= 1, got {self.oversample}")
        if self.method is not None and self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose one of {METHODS}")


@dataclass(frozen=True)
class FrequencyEnsemble:
    """Complex frequency atoms; row k-1 holds Z_k for k = 1..T."""

    grid: Grid
    atoms: np.ndarray

    @property
    def T(self) -> int:
        return self.atoms.shape[0]


@dataclass(frozen=True)
class FtsSample:
    """Simulated functional sample; row t-1 holds X_t on the grid.

    imag_residual records the largest imaginary magnitude discarded by the
    synthesis, relative to the largest real magnitude.
    """

    grid: Grid
    values: np.ndarray
    config: SimConfig | None = None
    imag_residual: float = 0.0


def default_method(spec: SpectralDensitySpec) -> str:
    if isinstance(spec, (EigenSpec, KernelSpec)):
        return "ckl"
    if isinstance(spec, FilterSpec):
        return "filter"
    if isinstance(spec, FarfimaSpec):
        return "farfima-spectral"
    raise TypeError(f"unknown spectral density spec {type(spec).__name__}")


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else SPECSIM_THREADS, else 1."""
    if workers is not None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        return workers
    env = os.environ.get("SPECSIM_THREADS", "").strip()
    if env:
        try:
            parsed = int(env)
        except ValueError:
            raise ValueError(f"SPECSIM_THREADS is not an integer: {env!r}") from None
        if parsed < 1:
            raise ValueError(f"SPECSIM_THREADS must be >= 1, got {parsed}")
        return parsed
    return 1


# ---------------------------------------------------------------------------
# atom factories: per-spec preparation done once, then one cheap draw per
# frequency.  draw_pair returns the two independent real-parameter draws
# (Z', Z'') of one frequency; the imaginary-part draw is skipped where the
# symmetrization does not need it.

class _CklAtoms:
    def __init__(self, spec: EigenSpec, grid: Grid, N: int):
        self.spec = spec
        self.grid = grid
        self.N = N if spec.n_max is None else min(N, spec.n_max)

    def draw_pair(self, omega, rng_re, rng_im=None):
        lam, phi = _eigen_rows(self.spec, omega, self.grid, self.N)
        root = np.sqrt(lam)
        zr = (root * rng_re.standard_normal(self.N)) @ phi
        zi = None if rng_im is None else (root * rng_im.standard_normal(self.N)) @ phi
        return zr.astype(complex), (None if zi is None else zi.astype(complex))


class _FilterAtoms:
    def __init__(self, spec: FilterSpec, grid: Grid, N: int):
        values, functions = noise_components(spec.noise, grid, N)
        self.scaled = np.sqrt(values)[:, None] * functions
        self.R = len(values)
        self.spec = spec
        self.grid = grid

    def _one(self, omega, rng):
        y = rng.standard_normal(self.R) @ self.scaled
        return _response_apply(self.spec.response, omega, self.grid, y) / np.sqrt(TWO_PI)

    def draw_pair(self, omega, rng_re, rng_im=None):
        zr = self._one(omega, rng_re)
        zi = None if rng_im is None else self._one(omega, rng_im)
        return zr, zi


class _FarfimaAtoms:
    def __init__(self, spec: FarfimaSpec, grid: Grid, N: int):
        values, functions = noise_components(spec.noise, grid, N)
        self.scaled = np.sqrt(values)[:, None] * functions
        self.R = len(values)
        self.spec = spec
        self.grid = grid
        self.ar_tables, self.ma_tables = farfima_operator_tables(spec, grid)

    def draw_pair(self, omega, rng_re, rng_im=None):
        half = _fractional_half_factor(omega, self.spec.d)
        ys = [rng_re.standard_normal(self.R) @ self.scaled]
        if rng_im is not None:
            ys.append(rng_im.standard_normal(self.R) @ self.scaled)
        if half == 0.0:
            zeros = np.zeros(self.grid.M, dtype=complex)
            return zeros, (zeros.copy() if rng_im is not None else None)
        rhs = np.stack(
            [_ma_apply(self.ma_tables, omega, self.grid, y) for y in ys], axis=1
        )
        out = _ar_solve(self.ar_tables, omega, self.grid, rhs) * (half / np.sqrt(TWO_PI))
        zr = out[:, 0]
        zi = out[:, 1] if rng_im is not None else None
        return zr, zi


class _NumericCklAtoms:
    """CKL draws for densities without analytic eigenpairs: decompose
    F(omega) numerically at every frequency."""

    def __init__(self, spec: SpectralDensitySpec, grid: Grid, N: int):
        self.spec = spec
        self.grid = grid
        self.N = min(N, grid.M)

    def draw_pair(self, omega, rng_re, rng_im=None, real_atom=False):
        F = eval_spectral_density(self.spec, omega, self.grid)
        if real_atom:
            sym = (F.values.real + F.values.real.T) / 2
            F = ComplexOperatorMatrix(self.grid, sym.astype(complex))
        pairs = truncated_eigendecomposition(F, self.N)
        scaled = np.sqrt(pairs.eigenvalues)[:, None] * pairs.eigenfunctions
        zr = rng_re.standard_normal(self.N) @ scaled
        zi = None if rng_im is None else rng_im.standard_normal(self.N) @ scaled
        return zr, zi


def _atom_factory(spec: SpectralDensitySpec, grid: Grid, N: int):
    if isinstance(spec, EigenSpec):
        return _CklAtoms(spec, grid, N)
    if isinstance(spec, FilterSpec):
        return _FilterAtoms(spec, grid, N)
    if isinstance(spec, FarfimaSpec):
        return _FarfimaAtoms(spec, grid, N)
    if isinstance(spec, KernelSpec):
        return _NumericCklAtoms(spec, grid, N)
    raise TypeError(f"unknown spectral density spec {type(spec).__name__}")


def draw_atom_ckl(spec: EigenSpec, omega: float, grid: Grid, N: int,
                  rng: np.random.Generator) -> np.ndarray:
    """One frequency atom sum_n sqrt(lambda_n) phi_n xi_n with iid standard
    normal xi; covariance is the N-truncated F(omega)."""
    return _CklAtoms(spec, grid, N).draw_pair(omega, rng)[0]


def draw_atom_filter(spec: FilterSpec, omega: float, grid: Grid, N: int,
                     rng: np.random.Generator) -> np.ndarray:
    """One filtered atom (2pi)^{-1/2} Theta(omega) Y with Y an N-truncated
    draw from the innovation covariance."""
    return _FilterAtoms(spec, grid, N).draw_pair(omega, rng)[0]


def draw_atom_farfima(spec: FarfimaSpec, omega: float, grid: Grid, N: int,
                      rng: np.random.Generator) -> np.ndarray:
    """One FARFIMA atom (2pi)^{-1/2} [2 sin(omega/2)]^{-d} A^{-1} B Y."""
    return _FarfimaAtoms(spec, grid, N).draw_pair(omega, rng)[0]


# ---------------------------------------------------------------------------
# ensemble assembly and synthesis

def _realify(z: np.ndarray, omega: float) -> np.ndarray:
    scale = max(float(np.abs(z.real).max()), 1e-300)
    if np.abs(z.imag).max() > 1e-8 * scale:
        raise ValueError(
            f"spectral density is not real at omega = {omega:.6g}; atoms at the "
            "self-conjugate frequencies pi and 2 pi must be real"
        )
    return z.real


def assemble_ensemble(spec: SpectralDensitySpec, config: SimConfig, grid: Grid,
                      workers: int | None = None) -> FrequencyEnsemble:
    """Draw the conjugate-symmetric atom ensemble for one sample.

    Atoms at k < T/2 combine two independent real-parameter draws as
    Z'_k + i Z''_k and are mirrored to Z_{T-k} = conj(Z_k); the self-conjugate
    atoms k = T/2 and k = T are sqrt(2) times a single real draw.  Every draw
    comes from substream (seed, part, k), so the result is identical for any
    worker count.
    """
    T = config.T
    if grid.M != config.M:
        raise ValueError(f"grid has M={grid.M} but config says M={config.M}")
    factory = _atom_factory(spec, grid, config.N)
    numeric = isinstance(factory, _NumericCklAtoms)
    skip_last = isinstance(spec, FarfimaSpec) and spec.d != 0.0
    stream = GaussianStream(config.seed)
    atoms = np.zeros((T, grid.M), dtype=complex)

    def fill(k: int) -> None:
        omega = TWO_PI * k / T
        if k == T or k == T // 2:
            if k == T and skip_last:
                return  # the weak spectral density vanishes at 2 pi
            kwargs = {"real_atom": True} if numeric else {}
            z, _ = factory.draw_pair(omega, stream.generator(ATOM_REAL, k), **kwargs)
            atoms[k - 1] = np.sqrt(2.0) * _realify(np.asarray(z, dtype=complex), omega)
        else:
            zr, zi = factory.draw_pair(
                omega, stream.generator(ATOM_REAL, k), stream.generator(ATOM_IMAG, k)
            )
            z = zr + 1j * zi
            atoms[k - 1] = z
            atoms[T - k - 1] = np.conj(z)

    ks = list(range(1, T // 2 + 1)) + [T]
    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(ks) < 4:
        for k in ks:
            fill(k)
    else:
        chunks = [ks[i::n_workers] for i in range(n_workers)]

        def fill_chunk(chunk):
            for k in chunk:
                fill(k)

        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(fill_chunk, chunks))
    return FrequencyEnsemble(grid, atoms)


def synthesize(ensemble: FrequencyEnsemble, config: SimConfig | None = None) -> FtsSample:
    """Inverse-FFT synthesis of the atom ensemble into a real sample.

    Validates the conjugate symmetry that makes the output real; the residual
    imaginary part is recorded on the sample and discarded.
    """
    atoms = ensemble.atoms
    T, M = atoms.shape
    if T < 2 or T % 2:
        raise ValueError(f"ensemble length must be even and >= 2, got {T}")
    scale = max(float(np.abs(atoms).max()), 1e-300)
    half = T // 2
    upper = atoms[0 : half - 1]
    mirrored = atoms[T - 2 : half - 1 : -1]
    if np.abs(mirrored - upper.conj()).max() > 1e-8 * scale:
        raise ValueError("ensemble breaks the conjugate symmetry Z_{T-k} = conj(Z_k)")
    if max(np.abs(atoms[half - 1].imag).max(), np.abs(atoms[T - 1].imag).max()) > 1e-8 * scale:
        raise ValueError("ensemble atoms at k = T/2 and k = T must be real")

    spectrum = np.roll(atoms, 1, axis=0)  # index j holds the e^{2pi i t j/T} coefficient
    rows = np.fft.ifft(spectrum, axis=0) * np.sqrt(np.pi * T)
    rows = np.roll(rows, -1, axis=0)  # rows t = 1..T
    real_scale = max(float(np.abs(rows.real).max()), 1e-300)
    residual = float(np.abs(rows.imag).max() / real_scale)
    values = np.ascontiguousarray(rows.real)
    return FtsSample(ensemble.grid, values, config, residual)


def simulate(spec: SpectralDensitySpec, config: SimConfig, grid: Grid | None = None,
             workers: int | None = None, burnin: int | None = None) -> FtsSample:
    """Simulate a stationary mean-zero Gaussian sample X_1..X_T.

    Dispatches on config.method (spectral pipelines here; the hybrid and
    temporal FARFIMA routes live in simulate_temporal).  With oversample = k
    the pipeline runs at length k T and a contiguous block of length T is
    returned, its offset drawn from the stream, which breaks the circular
    dependence between X_1 and X_T at the cost of a longer transform.
    """
    if grid is None:
        grid = make_grid(config.M)
    elif grid.M != config.M:
        raise ValueError(f"grid has M={grid.M} but config says M={config.M}")
    method = config.method or default_method(spec)
    if method in ("farfima-spectral", "farfima-hybrid", "temporal") and not isinstance(spec, FarfimaSpec):
        raise ValueError(f"method {method!r} needs a FarfimaSpec, got {type(spec).__name__}")
    if method == "ckl" and not isinstance(spec, (EigenSpec, KernelSpec)):
        raise ValueError(f"method 'ckl' needs an EigenSpec or KernelSpec, got {type(spec).__name__}")
    if method == "filter" and not isinstance(spec, FilterSpec):
        raise ValueError(f"method 'filter' needs a FilterSpec, got {type(spec).__name__}")

    T_total = config.T * config.oversample
    inner = replace(config, T=T_total, oversample=1)
    if method in ("ckl", "filter", "farfima-spectral"):
        ensemble = assemble_ensemble(spec, inner, grid, workers)
        sample = synthesize(ensemble, config)
    elif method == "farfima-hybrid":
        from .simulate_temporal import hybrid_farfima

        sample = hybrid_farfima(spec, inner, grid, burnin=burnin, workers=workers)
    else:  # temporal
        from .simulate_temporal import temporal_farfima

        sample = temporal_farfima(spec, T_total, grid, config.N, burnin=burnin,
                                  stream=GaussianStream(config.seed))

    values = sample.values
    if config.oversample > 1:
        offset = int(
            GaussianStream(config.seed)
            .generator(OFFSET)
            .integers(0, T_total - config.T, endpoint=True)
        )
        values = values[offset : offset + config.T]
    return FtsSample(grid, np.ascontiguousarray(values), config, sample.imag_residual)
