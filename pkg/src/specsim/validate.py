"""Monte-Carlo validation and timing of the simulation pipelines.

Empirical autocovariances from simulated samples are compared with the
covariance targets in spectra (true or finite-T) through relative trace-norm
errors.  Replicates run on independent derived seeds, so a replicate study
is reproducible for any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from statistics import median

import numpy as np

from .grid import Grid, RealKernelMatrix, make_grid, operator_norms
from .simulate_spectral import FtsSample, SimConfig, resolve_workers, simulate
from .spectra import SpectralDensitySpec
from .streams import GaussianStream

__all__ = [
    "empirical_autocovariances",
    "average_autocovariances",
    "relative_error",
    "relative_errors",
    "replicate_autocovariances",
    "BenchRecord",
    "run_benchmark",
]


def _check_lags(lags, T: int) -> tuple[int, ...]:
    out = tuple(int(h) for h in lags)
    for h in out:
        if h < 0 or h >= T:
            raise ValueError(f"lag {h} is outside [0, T) for T = {T}")
    return out


def empirical_autocovariances(sample: FtsSample | np.ndarray, lags,
                              grid: Grid | None = None) -> dict[int, RealKernelMatrix]:
    """Sample autocovariance kernels (1/T) sum_{t<=T-h} X_{t+h} (x) X_t.

    The 1/T normalization keeps the estimator positive semidefinite across
    lags at the cost of an (T - h)/T shrinkage bias at lag h.
    """
    if isinstance(sample, FtsSample):
        values = sample.values
        grid = sample.grid
    else:
        values = np.asarray(sample, dtype=float)
        if grid is None:
            raise ValueError("grid is required when passing a bare sample array")
    if values.ndim != 2 or values.shape[1] != grid.M:
        raise ValueError(f"expected a (T, {grid.M}) sample array, got shape {values.shape}")
    T = values.shape[0]
    out = {}
    for h in _check_lags(lags, T):
        block = values[h:].T @ values[: T - h] / T
        out[h] = RealKernelMatrix(grid, block)
    return out


def average_autocovariances(estimates: list[dict[int, RealKernelMatrix]]) -> dict[int, RealKernelMatrix]:
    """Pointwise average of per-replicate autocovariance estimates."""
    if not estimates:
        raise ValueError("no estimates to average")
    lags = sorted(estimates[0])
    for est in estimates:
        if sorted(est) != lags:
            raise ValueError("estimates cover different lag sets")
    grid = estimates[0][lags[0]].grid
    return {
        h: RealKernelMatrix(grid, np.mean([est[h].values for est in estimates], axis=0))
        for h in lags
    }


def relative_error(estimate: RealKernelMatrix, target: RealKernelMatrix,
                   reference: RealKernelMatrix | None = None) -> float:
    """Trace-norm error ||estimate - target|| / ||reference||.

    The reference defaults to the target itself.  Accuracy studies at lag h
    pass the lag-0 covariance as the reference, which keeps the metric finite
    at lags where the target vanishes (e.g. white noise at h > 0).
    """
    diff = RealKernelMatrix(target.grid, estimate.values - target.values)
    denom = operator_norms(target if reference is None else reference).trace
    if denom == 0.0:
        raise ValueError("reference operator has zero trace norm")
    return operator_norms(diff).trace / denom


def relative_errors(estimates: dict[int, RealKernelMatrix],
                    targets: dict[int, RealKernelMatrix]) -> dict[int, float]:
    """Per-lag trace-norm errors, all normalized by the lag-0 target norm.

    Requires lag 0 among the targets; estimates must cover the target lags.
    """
    if 0 not in targets:
        raise ValueError("targets must include lag 0, the normalization reference")
    missing = sorted(set(targets) - set(estimates))
    if missing:
        raise ValueError(f"estimates are missing lags {missing}")
    return {h: relative_error(estimates[h], targets[h], targets[0])
            for h in sorted(targets)}


def replicate_autocovariances(spec: SpectralDensitySpec, config: SimConfig, lags,
                              replicates: int, grid: Grid | None = None,
                              workers: int | None = None,
                              burnin: int | None = None) -> dict[int, RealKernelMatrix]:
    """Average autocovariance estimate over independent replicates.

    Replicate i runs the full pipeline on a seed derived from (config.seed, i),
    so results do not depend on scheduling.  Threads parallelize across
    replicates; the per-sample pipelines then run single-threaded.
    """
    if replicates < 1:
        raise ValueError(f"replicate count must be positive, got {replicates}")
    if grid is None:
        grid = make_grid(config.M)
    base = GaussianStream(config.seed)
    lags = tuple(lags)

    def one(i: int) -> dict[int, RealKernelMatrix]:
        cfg = replace(config, seed=base.replicate_seed(i))
        sample = simulate(spec, cfg, grid, workers=1, burnin=burnin)
        return empirical_autocovariances(sample, lags)

    n_workers = min(resolve_workers(workers), replicates)
    if n_workers == 1:
        results = [one(i) for i in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(one, range(replicates)))
    return average_autocovariances(results)


@dataclass(frozen=True)
class BenchRecord:
    """Median wall-clock seconds for one (method, size) cell."""

    method: str
    T: int
    M: int
    N: int
    seconds: float
    repeats: int


def run_benchmark(spec: SpectralDensitySpec, configs, repeats: int = 3,
                  warmup: bool = True, grid: Grid | None = None,
                  burnin: int | None = None) -> list[BenchRecord]:
    """Time simulate() for each config, reporting the median of `repeats`.

    A warmup pass per config keeps one-time costs (cached spectral tables,
    compiled recursion kernels) out of the measurement.
    """
    if repeats < 1:
        raise ValueError(f"repeat count must be positive, got {repeats}")
    records = []
    for config in configs:
        g = grid if grid is not None and grid.M == config.M else make_grid(config.M)
        if warmup:
            simulate(spec, config, g, workers=1, burnin=burnin)
        times = []
        for r in range(repeats):
            cfg = replace(config, seed=GaussianStream(config.seed).replicate_seed(r))
            start = time.perf_counter()
            simulate(spec, cfg, g, workers=1, burnin=burnin)
            times.append(time.perf_counter() - start)
        method = config.method or "auto"
        records.append(BenchRecord(method, config.T, config.M, config.N,
                                   median(times), repeats))
    return records
