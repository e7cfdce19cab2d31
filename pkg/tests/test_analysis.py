import math

import numpy as np
import pytest
from scipy import optimize, stats

from selfwiener.analysis import (
    BinContext,
    bin_contexts,
    mmse_bin,
    optimality_gap_high,
    optimality_gap_low,
    predicted_mse_bin,
    predicted_mse_total,
    rho,
    rho_quadrature,
    threshold_probability,
    varrho,
    varrho_quadrature,
)
from selfwiener.bench import FilterSpec, SignalSpec, make_filter, make_signal, solve_sigma_for_snr
from selfwiener.estimators import DeconvProblem, empirical_mse, sw_estimate
from selfwiener.exceptions import DimensionError, InvalidInputError
from selfwiener.spectral import unitary_dft


def test_rho_value():
    assert rho() == pytest.approx(0.046402, abs=1e-6)
    assert rho() == pytest.approx(rho_quadrature(), abs=1e-10)


def test_varrho_value():
    assert varrho() == pytest.approx(varrho_quadrature(), abs=1e-10)
    assert varrho() == pytest.approx(0.1529, abs=1e-4)


def test_rho_by_monte_carlo():
    # E|x_hat|^2 for pure complex noise of unit variance
    r = np.random.default_rng(5)
    z = (r.standard_normal(2_000_000) + 1j * r.standard_normal(2_000_000)) / math.sqrt(2)
    est = sw_estimate(DeconvProblem.white(z, np.ones(z.size), 1.0)).x_hat
    vals = np.abs(est) ** 2
    assert abs(vals.mean() - rho()) <= 4 * vals.std() / math.sqrt(vals.size)


def test_zero_signal_predicts_rho():
    pr = predicted_mse_bin(BinContext(0.0, 2.0))
    assert pr.regime == "low"
    assert pr.mse == pytest.approx(2.0 * rho(), rel=1e-14)
    assert predicted_mse_bin(BinContext(0.0, 2.0, True)).mse == pytest.approx(2.0 * varrho())


def test_high_snr_gap():
    ctx = BinContext.from_snr(1e4)
    pr = predicted_mse_bin(ctx)
    assert pr.regime == "high"
    gap = pr.mse - mmse_bin(ctx)
    assert abs(gap - 1e-4) <= 0.1e-4
    assert optimality_gap_high(ctx) == pytest.approx(1 / (1 + 1e4))


@pytest.mark.parametrize("tau", [3.0, 6.0, 10.0])
@pytest.mark.parametrize("real", [False, True])
def test_continuity_at_regime_edges(tau, real):
    for edge in (-tau, tau):
        inside = predicted_mse_bin(BinContext.from_snr(10 ** ((edge - 1e-9 * np.sign(edge)) / 10), 1.0, real), tau)
        outside = predicted_mse_bin(BinContext.from_snr(10 ** ((edge + 1e-9 * np.sign(edge)) / 10), 1.0, real), tau)
        assert inside.regime == "interpolated"
        assert outside.regime in ("low", "high")
        assert inside.mse == pytest.approx(outside.mse, rel=1e-7)


def test_interpolation_midpoint():
    pr = predicted_mse_bin(BinContext.from_snr(1.0))
    assert pr.f_tau == pytest.approx(0.5)
    assert pr.mse == pytest.approx(0.5 * (pr.eps_low2 + pr.eps_high2))


def test_bad_tau():
    with pytest.raises(InvalidInputError):
        predicted_mse_bin(BinContext(1.0, 1.0), tau_db=0.0)


def test_mmse_examples():
    assert mmse_bin(BinContext(0.0, 1.0)) == 0
    assert mmse_bin(BinContext(1.0, 1.0)) == 0.5
    assert mmse_bin(BinContext(1e6, 1e-6)) == pytest.approx(1e-6, rel=1e-9)


def test_threshold_probability_ends():
    assert threshold_probability(BinContext(0.0, 1.0)) == pytest.approx(math.exp(-4), rel=1e-12)
    assert threshold_probability(BinContext.from_snr(100.0)) >= 1 - 1e-6
    assert threshold_probability(BinContext(0.0, 1.0, True)) == pytest.approx(2 * stats.norm.sf(2), rel=1e-12)


def test_threshold_probability_matches_ncx2():
    for s in (0.1, 1.0, 3.0, 10.0, 30.0):
        # 2|Z|^2 is noncentral chi-square with 2 dof and noncentrality 2 SNR
        ref = stats.ncx2.sf(8.0, 2, 2 * s)
        assert threshold_probability(BinContext.from_snr(s)) == pytest.approx(ref, rel=1e-9)


def test_half_probability_point():
    f = lambda s: threshold_probability(BinContext.from_snr(s)) - 0.5
    s_half = optimize.brentq(f, 1.0, 10.0, xtol=1e-12)
    assert s_half == pytest.approx(3.488, abs=1e-3)
    r = np.random.default_rng(11)
    n = 400_000
    z = math.sqrt(s_half) + (r.standard_normal(n) + 1j * r.standard_normal(n)) / math.sqrt(2)
    frac = np.mean(np.abs(z) > 2)
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_probability_matches_simulated_estimator(rng):
    for s in (0.5, 2.0, 6.0):
        n = 200_000
        y = math.sqrt(s) + (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
        res = sw_estimate(DeconvProblem.white(y, np.ones(n), 1.0))
        p = threshold_probability(BinContext.from_snr(s))
        assert abs(res.diagnostics.above_threshold.mean() - p) <= 3.5 * math.sqrt(p * (1 - p) / n)


snr_grid = 10 ** (np.linspace(-30, 40, 141) / 10)


@pytest.mark.parametrize("real", [False, True])
def test_prediction_never_below_mmse(real):
    for s in snr_grid:
        ctx = BinContext.from_snr(s, 0.7, real)
        assert predicted_mse_bin(ctx).mse >= mmse_bin(ctx)


@pytest.mark.parametrize("real", [False, True])
def test_low_gap_identity(real):
    for s in snr_grid:
        ctx = BinContext.from_snr(s, 1.3, real)
        pr = predicted_mse_bin(ctx)
        assert pr.eps_low2 - mmse_bin(ctx) == pytest.approx(optimality_gap_low(ctx), rel=1e-9)


def test_real_bins_cost_more_at_low_snr():
    for s in snr_grid[snr_grid < 0.25]:
        assert predicted_mse_bin(BinContext.from_snr(s, 1, True)).mse > predicted_mse_bin(BinContext.from_snr(s)).mse


def test_prediction_continuous_in_snr():
    s = 10 ** (np.linspace(-20, 30, 5001) / 10)
    m = np.array([predicted_mse_bin(BinContext.from_snr(v)).mse for v in s])
    steps = np.abs(np.diff(m)) / np.maximum(m[1:], 1e-12)
    assert steps.max() < 0.02


def test_total_two_bins():
    X, H = np.array([1.0, 0.5]), np.array([1.0, 0.5])
    total, preds = predicted_mse_total(X, H, 0.25)
    assert all(c.is_real_bin for c in bin_contexts(X, H, 0.25))
    assert total == pytest.approx(preds[0].mse + preds[1].mse, rel=1e-15)
    assert preds[0].mse == predicted_mse_bin(BinContext(1.0, 0.25, True)).mse
    assert preds[1].mse == predicted_mse_bin(BinContext(0.25, 1.0, True)).mse


def test_bin_contexts_shapes():
    with pytest.raises(DimensionError):
        bin_contexts(np.ones(4), np.ones(5), 1.0)
    ctxs = bin_contexts(np.ones(6), np.full(6, 2.0), 1.0)
    assert [c.is_real_bin for c in ctxs] == [True, False, False, True, False, False]
    assert ctxs[1].sigma_eff2 == 0.25


@pytest.mark.parametrize("snr_db", [0.0, 10.0, 20.0])
def test_total_matches_simulation(snr_db):
    n, trials = 100, 10_000
    X = make_signal(SignalSpec("X1", n))
    H = make_filter(FilterSpec(0.25, n))
    s2 = solve_sigma_for_snr(X, H, snr_db)
    r = np.random.default_rng(int(snr_db) + 100)
    v = r.normal(0, math.sqrt(s2), (trials, n))
    Y = H * X + np.fft.fft(v, axis=-1, norm="ortho")
    err = empirical_mse(X, sw_estimate(DeconvProblem(Y, H, np.full((trials, 1), s2))).x_hat)
    predicted, _ = predicted_mse_total(X, H, s2)
    assert abs(10 * math.log10(predicted / err.mean())) <= 1.0


def test_high_snr_total_approaches_ls_floor():
    n = 100
    X = make_signal(SignalSpec("X2", n, delta=0.01))
    H = make_filter(FilterSpec(0.25, n))
    s2 = solve_sigma_for_snr(X, H, 70.0)
    total, _ = predicted_mse_total(X, H, s2)
    ls_floor = float(np.sum(s2 / np.abs(H) ** 2))
    assert total == pytest.approx(ls_floor, rel=1e-3)


@pytest.mark.parametrize("snr_db", [20.0, 30.0])
def test_high_snr_simulated_gap_is_twice_noise_over_snr(snr_db):
    # the shrinkage bias and the extra variance each contribute sigma^2 / SNR
    snr, n = 10 ** (snr_db / 10), 200_000
    r = np.random.default_rng(int(snr_db))
    x = np.full(n, math.sqrt(snr), dtype=complex)
    y = x + (r.standard_normal(n) + 1j * r.standard_normal(n)) / math.sqrt(2)
    p = DeconvProblem(y, np.ones(n), 1.0)
    from selfwiener.estimators import mmse_oracle_estimate

    gap = np.abs(sw_estimate(p).x_hat - x) ** 2 - np.abs(mmse_oracle_estimate(x, p) - x) ** 2
    assert abs(gap.mean() * snr - 2.0) <= 4 * gap.std() * snr / math.sqrt(n) + 0.05
