"""Time-domain FARFIMA recursion and the hybrid route."""

import mpmath
import numpy as np
import pytest

from specsim import (
    FarfimaSpec,
    GaussianStream,
    LowRankSum,
    RankOneKernel,
    SimConfig,
    brownian_motion_covariance,
    covariance_kernel_matrix,
    default_burnin,
    finite_T_target_covariances,
    frac_coeffs,
    fractional_convolve,
    hybrid_farfima,
    make_grid,
    relative_error,
    replicate_autocovariances,
    shifted_sine_spec,
    simulate,
    simulate_noise,
    smooth_farma_spec,
    temporal_farfima,
    true_autocovariances,
    white_noise_spec,
)
from specsim.streams import NOISE

GAUSS_BUMP = lambda x: np.exp(x**2 / 2.0)


# ---------------------------------------------------------------------------
# fractional coefficients

def test_frac_coeffs_no_memory():
    np.testing.assert_array_equal(frac_coeffs(0.0, 6), [1, 0, 0, 0, 0, 0])


def test_frac_coeffs_small_orders():
    c = frac_coeffs(0.2, 4)
    assert c[0] == 1.0
    assert c[1] == pytest.approx(0.2, rel=1e-15)
    assert c[2] == pytest.approx(0.12, rel=1e-15)       # 0.2 * 1.2 / 2
    assert c[3] == pytest.approx(0.088, rel=1e-15)      # 0.12 * 2.2 / 3


@pytest.mark.parametrize("d", [0.1, 0.2, 0.4, 0.45])
def test_frac_coeffs_match_gamma_ratio(d):
    # c_k = Gamma(k + d) / (Gamma(d) k!).  Direct Gamma evaluation overflows
    # near k ~ 170 and float64 log-gamma differences carry ~2e-12 noise at
    # k = 1000, so the reference is evaluated in extended precision.
    c = frac_coeffs(d, 1001)
    with mpmath.workdps(40):
        lg = mpmath.loggamma
        dd = mpmath.mpf(d)
        oracle = np.array([float(mpmath.e ** (lg(k + dd) - lg(dd) - lg(k + 1)))
                           for k in range(1, 1001)])
    np.testing.assert_allclose(c[1:], oracle, rtol=1e-12)


def test_frac_coeffs_negative_memory_decay():
    c = frac_coeffs(-0.3, 50)
    assert c[1] == pytest.approx(-0.3, rel=1e-15)
    assert (c[1:] < 0).all()
    assert (np.abs(c[2:]) < np.abs(c[1:-1])).all()


def test_frac_coeffs_validation():
    for d in (0.5, -0.5, 0.7):
        with pytest.raises(ValueError, match="memory parameter"):
            frac_coeffs(d, 3)
    with pytest.raises(ValueError, match="count"):
        frac_coeffs(0.2, 0)


def test_fractional_convolve_small_case():
    coeffs = np.array([1.0, 0.5, 0.25])
    eta = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    out = fractional_convolve(coeffs, eta)
    np.testing.assert_allclose(out, [[1.0, 0.0], [0.5, 1.0], [1.25, 1.5]])


def test_fractional_convolve_validation():
    with pytest.raises(ValueError, match="sample array"):
        fractional_convolve(np.ones(3), np.ones(3))
    with pytest.raises(ValueError, match="coefficients"):
        fractional_convolve(np.ones(2), np.ones((3, 2)))


def test_default_burnin_scales_with_ar_order():
    assert default_burnin(white_noise_spec()) == 200
    bm = brownian_motion_covariance()
    long_ar = FarfimaSpec(ar=(RankOneKernel(0.001, GAUSS_BUMP),) * 60, noise=bm)
    assert default_burnin(long_ar) == 240


# ---------------------------------------------------------------------------
# innovation draws

def test_simulate_noise_zero_coefficient():
    cov = LowRankSum((0.0,), (GAUSS_BUMP,))
    rows = simulate_noise(cov, 5, make_grid(7), 1, np.random.default_rng(0))
    np.testing.assert_array_equal(rows, 0.0)


def test_simulate_noise_rank_one_rows():
    grid = make_grid(7)
    cov = LowRankSum((2.0,), (GAUSS_BUMP,))
    rows = simulate_noise(cov, 6, grid, 1, np.random.default_rng(1))
    f = GAUSS_BUMP(grid.points)
    # every row is a scalar multiple of the single component
    coef = rows[:, 0] / f[0]
    np.testing.assert_allclose(rows, np.outer(coef, f), rtol=1e-12)


def test_simulate_noise_length_validation():
    with pytest.raises(ValueError, match="positive"):
        simulate_noise(brownian_motion_covariance(), 0, make_grid(5), 2,
                       np.random.default_rng(0))


def test_simulate_noise_covariance():
    grid = make_grid(11)
    cov = brownian_motion_covariance()
    ref = covariance_kernel_matrix(cov, grid, 100).values
    rows = simulate_noise(cov, 10_000, grid, 100, np.random.default_rng(606))
    emp = rows.T @ rows / len(rows)
    err = np.linalg.norm(emp - ref) / np.linalg.norm(ref)
    assert err < 0.05, f"noise covariance rel error {err:.4f}"


# ---------------------------------------------------------------------------
# temporal recursion, exact paths

def test_temporal_identity_path_returns_noise_tail():
    grid = make_grid(9)
    spec = white_noise_spec()
    out = temporal_farfima(spec, 16, grid, 10, burnin=8, stream=GaussianStream(99))
    eta = simulate_noise(spec.noise, 24, grid, 10, GaussianStream(99).generator(NOISE))
    np.testing.assert_array_equal(out.values, eta[8:])


def test_temporal_far1_matches_manual_recursion():
    grid = make_grid(9)
    bm = brownian_motion_covariance()
    spec = FarfimaSpec(ar=(RankOneKernel(0.5, GAUSS_BUMP),), noise=bm)
    out = temporal_farfima(spec, 20, grid, 8, burnin=10, stream=GaussianStream(123))
    eta = simulate_noise(bm, 30, grid, 8, GaussianStream(123).generator(NOISE))
    g = GAUSS_BUMP(grid.points)
    x = np.zeros_like(eta)
    for t in range(30):
        x[t] = eta[t]
        if t > 0:
            x[t] += 0.5 * (grid.weights @ (g * x[t - 1])) * g
    np.testing.assert_allclose(out.values, x[10:], atol=1e-10)


def test_temporal_ma1_matches_manual_filter():
    grid = make_grid(9)
    bm = brownian_motion_covariance()
    spec = FarfimaSpec(ma=(RankOneKernel(0.3, GAUSS_BUMP),), noise=bm)
    T, burnin = 12, 6
    K = T + burnin
    out = temporal_farfima(spec, T, grid, 8, burnin=burnin, stream=GaussianStream(55))
    eta = simulate_noise(bm, K + 1, grid, 8, GaussianStream(55).generator(NOISE))
    g = GAUSS_BUMP(grid.points)
    zeta = eta[1:] + 0.3 * (eta[:-1] @ (grid.weights * g))[:, None] * g[None, :]
    np.testing.assert_allclose(out.values, zeta[K - T :], atol=1e-12)


def test_temporal_rank_one_and_dense_ar_agree():
    grid = make_grid(9)
    bm = brownian_motion_covariance()
    tagged = FarfimaSpec(ar=(RankOneKernel(0.4, GAUSS_BUMP),), noise=bm)
    dense = FarfimaSpec(ar=(lambda x, y: 0.4 * GAUSS_BUMP(x) * GAUSS_BUMP(y),), noise=bm)
    a = temporal_farfima(tagged, 16, grid, 8, burnin=12, stream=GaussianStream(3))
    b = temporal_farfima(dense, 16, grid, 8, burnin=12, stream=GaussianStream(3))
    np.testing.assert_allclose(a.values, b.values, atol=1e-10)


def test_temporal_noise_scaling_is_linear():
    grid = make_grid(9)
    base = FarfimaSpec(noise=LowRankSum((1.0,), (GAUSS_BUMP,)))
    scaled = FarfimaSpec(noise=LowRankSum((4.0,), (GAUSS_BUMP,)))
    a = temporal_farfima(base, 10, grid, 1, burnin=4, stream=GaussianStream(5))
    b = temporal_farfima(scaled, 10, grid, 1, burnin=4, stream=GaussianStream(5))
    np.testing.assert_allclose(b.values, 2.0 * a.values, rtol=1e-14)


def test_temporal_k_ma_contract():
    grid = make_grid(7)
    bm = brownian_motion_covariance()
    spec = FarfimaSpec(d=0.2, noise=bm)
    default = temporal_farfima(spec, 8, grid, 5, burnin=4, stream=GaussianStream(7))
    pinned = temporal_farfima(spec, 8, grid, 5, k_ma=12, burnin=4, stream=GaussianStream(7))
    np.testing.assert_array_equal(default.values, pinned.values)
    with pytest.raises(ValueError, match="k_ma"):
        temporal_farfima(spec, 8, grid, 5, k_ma=11, burnin=4)


def test_temporal_longer_k_ma_keeps_tail():
    grid = make_grid(7)
    spec = white_noise_spec()
    out = temporal_farfima(spec, 8, grid, 5, k_ma=20, burnin=4, stream=GaussianStream(7))
    eta = simulate_noise(spec.noise, 20, grid, 5, GaussianStream(7).generator(NOISE))
    np.testing.assert_array_equal(out.values, eta[12:])


def test_temporal_input_validation():
    grid = make_grid(5)
    with pytest.raises(TypeError, match="FarfimaSpec"):
        temporal_farfima(shifted_sine_spec(), 8, grid, 5)
    with pytest.raises(ValueError, match="positive"):
        temporal_farfima(white_noise_spec(), 0, grid, 5)
    with pytest.raises(ValueError, match="burn-in"):
        temporal_farfima(white_noise_spec(), 8, grid, 5, burnin=-1)


# ---------------------------------------------------------------------------
# hybrid route

def test_hybrid_without_ar_is_spectral_tail():
    grid = make_grid(11)
    spec = FarfimaSpec(d=0.2, noise=brownian_motion_covariance())
    config = SimConfig(T=32, M=11, N=10, seed=42)
    out = hybrid_farfima(spec, config, grid, burnin=10)
    full = simulate(spec, SimConfig(T=42, M=11, N=10, seed=42), grid=grid)
    np.testing.assert_array_equal(out.values, full.values[10:])


def test_hybrid_matches_manual_ar_recursion():
    grid = make_grid(11)
    bm = brownian_motion_covariance()
    spec = FarfimaSpec(ar=(RankOneKernel(0.5, GAUSS_BUMP),), d=0.1, noise=bm)
    config = SimConfig(T=16, M=11, N=10, seed=9)
    out = hybrid_farfima(spec, config, grid, burnin=8)
    base = FarfimaSpec(d=0.1, noise=bm)
    driver = simulate(base, SimConfig(T=24, M=11, N=10, seed=9), grid=grid).values
    g = GAUSS_BUMP(grid.points)
    x = np.zeros_like(driver)
    for t in range(24):
        x[t] = driver[t]
        if t > 0:
            x[t] += 0.5 * (grid.weights @ (g * x[t - 1])) * g
    np.testing.assert_allclose(out.values, x[8:], atol=1e-10)


def test_hybrid_input_validation():
    grid = make_grid(5)
    config = SimConfig(T=8, M=5, N=2)
    with pytest.raises(TypeError, match="FarfimaSpec"):
        hybrid_farfima(shifted_sine_spec(), config, grid)
    with pytest.raises(ValueError, match="burn-in"):
        hybrid_farfima(white_noise_spec(), config, grid, burnin=-2)


def test_hybrid_rounds_extension_to_even_length():
    grid = make_grid(5)
    spec = FarfimaSpec(d=0.2, noise=brownian_motion_covariance())
    out = hybrid_farfima(spec, SimConfig(T=8, M=5, N=3, seed=1), grid, burnin=3)
    assert out.values.shape == (8, 5)


# ---------------------------------------------------------------------------
# distributional checks, deterministic seeds

def test_burnin_shrinks_ar_startup_bias():
    # Near-unit AR: starting the recursion at zero depresses the variance
    # until the transient decays, so the lag-0 bias must drop sharply once
    # a burn-in prefix is discarded.
    grid = make_grid(11)
    spec = FarfimaSpec(ar=(RankOneKernel(0.66, GAUSS_BUMP),),
                       noise=brownian_motion_covariance())
    truth = true_autocovariances(spec, (0,), grid, N=30)[0]
    biases = {}
    for burnin in (0, 50, 200):
        config = SimConfig(T=64, M=11, N=30, seed=708, method="temporal")
        avg = replicate_autocovariances(spec, config, (0,), 400, grid,
                                        workers=4, burnin=burnin)
        biases[burnin] = relative_error(avg[0], truth)
    assert biases[0] > 5 * biases[50], f"biases {biases}"
    assert biases[0] > 5 * biases[200], f"biases {biases}"
    assert biases[200] <= biases[50] + 0.02, f"biases {biases}"


def test_three_routes_agree_for_farma():
    # FARMA(4, 3) with d = 0: the spectral, hybrid, and temporal routes
    # must estimate the same autocovariances.
    spec = smooth_farma_spec()
    grid = make_grid(51)
    T, N, I = 256, 50, 500
    targets = finite_T_target_covariances(spec, (0, 1), grid, T, N=N)
    ref0 = targets[0]
    averages = {}
    for method, seed in (("farfima-spectral", 21), ("farfima-hybrid", 22),
                         ("temporal", 23)):
        config = SimConfig(T=T, M=51, N=N, seed=seed, method=method)
        averages[method] = replicate_autocovariances(spec, config, (0, 1), I,
                                                     grid, workers=4)
    methods = list(averages)
    worst = 0.0
    for i in range(len(methods)):
        for j in range(i + 1, len(methods)):
            for h in (0, 1):
                err = relative_error(averages[methods[i]][h],
                                     averages[methods[j]][h], ref0)
                worst = max(worst, err)
    assert worst <= 0.1, f"worst pairwise disagreement {worst:.4f}"
