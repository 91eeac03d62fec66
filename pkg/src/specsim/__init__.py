"""Simulation of stationary Gaussian functional time series on [0, 1] from a
user-supplied spectral density operator, with exact covariance targets for
validating the output.

Quick start:

    import specsim as ss

    spec = ss.builtin_specs()["example1"]
    sample = ss.simulate(spec, ss.SimConfig(T=256, M=101, N=50, seed=7))
    est = ss.empirical_autocovariances(sample, lags=(0, 1))
    target = ss.finite_T_target_covariance(spec, 0, sample.grid, T=256, N=50)
    print(ss.relative_error(est[0], target))
"""

from .errors import NumericError, SingularFrequencyError
from .exprs import compile_expression
from .grid import (
    ComplexOperatorMatrix,
    EigenPairs,
    Grid,
    OperatorNorms,
    RealKernelMatrix,
    discretize_kernel,
    make_grid,
    operator_norms,
    sherman_morrison_inverse_apply,
    solve_linear_system,
    truncated_eigendecomposition,
)
from .simulate_spectral import (
    METHODS,
    FrequencyEnsemble,
    FtsSample,
    SimConfig,
    assemble_ensemble,
    default_method,
    draw_atom_ckl,
    draw_atom_farfima,
    draw_atom_filter,
    simulate,
    synthesize,
)
from .simulate_temporal import (
    default_burnin,
    frac_coeffs,
    fractional_convolve,
    hybrid_farfima,
    simulate_noise,
    temporal_farfima,
)
from .spectra import (
    ClosedFormKernel,
    CovarianceSpec,
    EigenSpec,
    FarfimaSpec,
    FilterSpec,
    IdentityResponse,
    KernelSpec,
    LowRankSum,
    MercerSeries,
    RankOneKernel,
    RankOneResponse,
    ScaledKernelResponse,
    SpectralDensitySpec,
    brownian_motion_covariance,
    builtin_specs,
    covariance_kernel_matrix,
    eval_spectral_density,
    farfima_frequency_response,
    farfima_stationarity_diagnostic,
    finite_T_target_covariance,
    finite_T_target_covariances,
    fractional_factor,
    long_memory_far_spec,
    noise_components,
    shifted_sine_kernel_spec,
    shifted_sine_spec,
    smooth_farma_spec,
    trig_noise_covariance,
    true_autocovariance,
    true_autocovariances,
    validate_spec,
    white_noise_spec,
)
from .streams import GaussianStream
from .validate import (
    BenchRecord,
    average_autocovariances,
    empirical_autocovariances,
    relative_error,
    relative_errors,
    replicate_autocovariances,
    run_benchmark,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "ClosedFormKernel",
    "ComplexOperatorMatrix",
    "CovarianceSpec",
    "EigenPairs",
    "EigenSpec",
    "FarfimaSpec",
    "FilterSpec",
    "FrequencyEnsemble",
    "FtsSample",
    "GaussianStream",
    "Grid",
    "IdentityResponse",
    "KernelSpec",
    "LowRankSum",
    "METHODS",
    "MercerSeries",
    "NumericError",
    "OperatorNorms",
    "RankOneKernel",
    "RankOneResponse",
    "RealKernelMatrix",
    "ScaledKernelResponse",
    "SimConfig",
    "SingularFrequencyError",
    "SpectralDensitySpec",
    "assemble_ensemble",
    "average_autocovariances",
    "brownian_motion_covariance",
    "builtin_specs",
    "compile_expression",
    "covariance_kernel_matrix",
    "default_burnin",
    "default_method",
    "discretize_kernel",
    "draw_atom_ckl",
    "draw_atom_farfima",
    "draw_atom_filter",
    "empirical_autocovariances",
    "eval_spectral_density",
    "farfima_frequency_response",
    "farfima_stationarity_diagnostic",
    "finite_T_target_covariance",
    "finite_T_target_covariances",
    "frac_coeffs",
    "fractional_convolve",
    "fractional_factor",
    "hybrid_farfima",
    "long_memory_far_spec",
    "make_grid",
    "noise_components",
    "operator_norms",
    "relative_error",
    "relative_errors",
    "replicate_autocovariances",
    "run_benchmark",
    "sherman_morrison_inverse_apply",
    "shifted_sine_kernel_spec",
    "shifted_sine_spec",
    "simulate",
    "simulate_noise",
    "smooth_farma_spec",
    "solve_linear_system",
    "synthesize",
    "temporal_farfima",
    "trig_noise_covariance",
    "true_autocovariance",
    "true_autocovariances",
    "truncated_eigendecomposition",
    "validate_spec",
    "white_noise_spec",
]
