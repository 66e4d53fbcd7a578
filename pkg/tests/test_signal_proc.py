"""Post-detection processing and the fringe fit."""

import math
import warnings

import numpy as np
import pytest

from fringelab import (
    FringeScan,
    LocalOscillator,
    PhotocurrentTrace,
    ResponseKernel,
    SampleGrid,
    SampledEnvelope,
    TraceTooShortError,
    box_average,
    delay_add,
    extract_visibility,
    homodyne_current,
    mean_square_power,
    trial_rng,
)


def _trace(samples, dt=1e-9, **prov):
    samples = np.asarray(samples, dtype=float)
    return PhotocurrentTrace(samples, SampleGrid(dt, samples.size), provenance=prov)


def test_box_average_single_sample_is_identity():
    x = trial_rng(0).standard_normal(5000)
    tr = _trace(x)
    out = box_average(tr, 1e-9)
    assert out is tr  # bit-exact identity


def test_box_average_constant_trace_unchanged():
    tr = _trace(np.full(4000, 2.5))
    out = box_average(tr, 40e-9)
    np.testing.assert_allclose(out.valid(), 2.5, rtol=1e-12)


def test_box_average_white_noise_variance_ratio():
    # closed form: averaging w iid samples divides the variance by w
    x = trial_rng(1).standard_normal(400_000)
    tr = _trace(x)
    out = box_average(tr, 50e-9)
    assert np.var(out.valid()) == pytest.approx(np.var(x) / 50, rel=0.05)


def test_box_average_window_guard():
    tr = _trace(np.zeros(100))
    with pytest.raises(TraceTooShortError):
        box_average(tr, 200e-9)
    with pytest.raises(ValueError):
        box_average(tr, 0.1e-9)


def test_box_average_equals_kernel_convolution():
    # dual route: cumulative-sum average vs FFT convolution with a 1/T box
    grid = SampleGrid(1e-9, 100_000)
    x = trial_rng(2).standard_normal(grid.n)
    tr = PhotocurrentTrace(x.copy(), grid)
    T = 73e-9
    avg = box_average(tr, T)
    env = SampledEnvelope(x.astype(complex) / 2.0, grid)  # X_0 quadrature = x
    conv = homodyne_current(env, LocalOscillator(1.0, 0.0), ResponseKernel.box(T, grid.dt))
    scale = np.abs(avg.valid()).max()
    assert np.abs(avg.valid() - conv.valid()).max() < 1e-10 * scale
    assert avg.valid_from == conv.valid_from


def test_mean_square_after_box_equals_conv_route():
    grid = SampleGrid(1e-9, 200_000)
    x = trial_rng(3).standard_normal(grid.n)
    T = 40e-9
    a = mean_square_power(box_average(PhotocurrentTrace(x.copy(), grid), T), n_boot=0)
    env = SampledEnvelope(x.astype(complex) / 2.0, grid)
    conv = homodyne_current(env, LocalOscillator(1.0, 0.0), ResponseKernel.box(T, grid.dt))
    b = mean_square_power(conv, n_boot=0)
    assert a.value == pytest.approx(b.value, rel=1e-10)


def test_delay_add_zero_delay_doubles():
    x = trial_rng(4).standard_normal(1000)
    out = delay_add(_trace(x), 0.0)
    np.testing.assert_array_equal(out.samples, 2 * x)


def test_delay_add_periodic_trace_doubles():
    t = np.arange(10_000) * 1e-9
    period = 50e-9
    x = np.sin(2 * math.pi * t / period)
    out = delay_add(_trace(x), period)
    np.testing.assert_allclose(out.samples, 2 * x[: out.samples.size], atol=1e-9)


def test_delay_add_shrinks_grid_and_guards():
    x = trial_rng(5).standard_normal(1000)
    out = delay_add(_trace(x), 100e-9)
    assert out.grid.n == 900
    np.testing.assert_array_equal(out.samples, x[:900] + x[100:])
    with pytest.raises(TraceTooShortError):
        delay_add(_trace(x), 600e-9)


def test_delay_add_commutes_with_box_average():
    # both are LTI; order changes only the valid-region bookkeeping
    x = trial_rng(6).standard_normal(50_000)
    a = delay_add(box_average(_trace(x), 20e-9), 100e-9)
    b = box_average(delay_add(_trace(x), 100e-9), 20e-9)
    start = max(a.valid_from, b.valid_from)
    np.testing.assert_allclose(
        a.samples[start : b.grid.n], b.samples[start:], rtol=1e-10, atol=1e-12
    )


def test_mean_square_power_zero_trace():
    est = mean_square_power(_trace(np.zeros(1000)), n_boot=0)
    assert est.value == 0.0


def test_mean_square_power_gaussian_unit_variance():
    x = trial_rng(7).standard_normal(200_000)
    est = mean_square_power(_trace(x), n_boot=50)
    # var(mean of x^2) = 2/n for iid normals
    assert est.value == pytest.approx(1.0, abs=3 * math.sqrt(2 / x.size))
    assert est.stderr == pytest.approx(math.sqrt(2 / x.size), rel=0.5)


def test_mean_square_power_sinusoid_half_amplitude_squared():
    t = np.arange(100_000)
    x = 3.0 * np.sin(2 * math.pi * t / 1000)  # whole periods
    est = mean_square_power(_trace(x), n_boot=0)
    assert est.value == pytest.approx(9.0 / 2.0, rel=1e-6)


def test_mean_square_power_t_av_guard_and_warning():
    x = trial_rng(8).standard_normal(10_000)
    with pytest.raises(TraceTooShortError):
        mean_square_power(_trace(x), T_av=20e-6)
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        mean_square_power(_trace(x, correlation_time=1e-6), n_boot=0)
    assert any("correlation times" in str(w.message) for w in rec)


def test_extract_visibility_exact_recovery():
    th = np.linspace(0, 3 * math.pi, 12)
    scan = FringeScan(th, 2.0 * (1 + 0.85 * np.cos(th + 0.3)))
    est = extract_visibility(scan)
    assert est.V == pytest.approx(0.85, abs=1e-6)
    assert est.phi0 == pytest.approx(0.3, abs=1e-6)
    assert est.baseline == pytest.approx(2.0, rel=1e-6)
    assert est.residual_rms < 1e-12


def test_extract_visibility_constant_scan():
    th = np.linspace(0, 3 * math.pi, 12)
    scan = FringeScan(th, np.ones_like(th), 0.05 * np.ones_like(th))
    est = extract_visibility(scan)
    assert est.V == pytest.approx(0.0, abs=1e-12)
    assert est.ci95 > 0.01  # visibility unconstrained at the noise scale


def test_extract_visibility_scale_invariance():
    th = np.linspace(0, 4 * math.pi, 16)
    rng = trial_rng(9)
    power = 1.5 * (1 + 0.4 * np.cos(th + 1.0)) + 0.01 * rng.standard_normal(th.size)
    a = extract_visibility(FringeScan(th, power))
    b = extract_visibility(FringeScan(th, 7.3 * power))
    assert a.V == pytest.approx(b.V, rel=1e-12)
    assert a.phi0 == pytest.approx(b.phi0, rel=1e-12)


def test_extract_visibility_requires_enough_span():
    th = np.linspace(0, math.pi, 12)
    with pytest.raises(ValueError):
        extract_visibility(FringeScan(th, np.ones_like(th)))
    th2 = np.linspace(0, 3 * math.pi, 6)
    with pytest.raises(ValueError):
        extract_visibility(FringeScan(th2, np.ones_like(th2)))


def test_extract_visibility_clips_at_zero_and_reports_minmax():
    th = np.linspace(0, 3 * math.pi, 12)
    rng = trial_rng(10)
    power = np.abs(1.0 + 1e-6 * rng.standard_normal(th.size))
    est = extract_visibility(FringeScan(th, power))
    assert est.V >= 0.0
    assert est.v_minmax >= 0.0


def test_weighted_fit_uses_stderr():
    th = np.linspace(0, 3 * math.pi, 24)
    clean = 1 + 0.5 * np.cos(th)
    noisy = clean.copy()
    noisy[5] += 5.0  # outlier with huge declared error
    err = np.full(th.size, 1e-3)
    err[5] = 100.0
    est = extract_visibility(FringeScan(th, noisy, err))
    assert est.V == pytest.approx(0.5, abs=1e-3)
