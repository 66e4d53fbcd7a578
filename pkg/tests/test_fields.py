"""Stochastic field synthesis: target statistics and estimator behavior."""

import math

import numpy as np
import pytest

from fringelab import (
    CoherenceModel,
    CorrelationNotPSDError,
    GridTooCoarseError,
    PulseOverlapError,
    PulseTrainSpec,
    SampleGrid,
    SampledEnvelope,
    TraceTooShortError,
    estimate_autocorrelation,
    estimate_cross_coherence,
    integrated_coherence_time,
    make_phase_diffusion_envelope,
    make_pulse_train,
    make_thermal_envelope,
    pulse_train_profile,
    triangular_correlation,
)
from fringelab.fields import pulse_template, toeplitz_correlation

TC = 2e-9
GRID = SampleGrid(0.05e-9, 400_000)  # 20 us = 1e4 coherence times


def test_grid_validation():
    with pytest.raises(ValueError):
        SampleGrid(-1e-9, 100)
    with pytest.raises(ValueError):
        SampleGrid(1e-9, 1)
    g = SampleGrid(1e-9, 100, t0=5e-9)
    assert g.duration == pytest.approx(100e-9)
    assert g.times()[0] == pytest.approx(5e-9)
    assert g.index_of(7e-9) == 7


def test_coherence_model_validation():
    with pytest.raises(ValueError):
        CoherenceModel("weird", 1e-9)
    with pytest.raises(ValueError):
        CoherenceModel("lorentzian", -1e-9)
    with pytest.raises(ValueError):
        CoherenceModel("lorentzian", 1e-9, I0=-1.0)


def test_thermal_requires_fine_grid_and_positive_params():
    model = CoherenceModel("lorentzian", TC)
    with pytest.raises(GridTooCoarseError):
        make_thermal_envelope(model, SampleGrid(0.2e-9, 1000), seed=0)
    with pytest.raises(ValueError):
        make_thermal_envelope(CoherenceModel("lorentzian", TC, I0=0.0), GRID, seed=0)
    with pytest.raises(ValueError):
        make_thermal_envelope(CoherenceModel("phase-diffusion", TC), GRID, seed=0)


def test_thermal_gamma_zero_is_one():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=3)
    curve = estimate_autocorrelation(env, 5 * TC, n_boot=0)
    assert curve.gamma[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", ["lorentzian", "gaussian"])
def test_thermal_autocorrelation_hits_target(kind):
    # oracle: time-domain lagged-product estimator over 1e4 coherence times
    env = make_thermal_envelope(CoherenceModel(kind, TC), GRID, seed=11)
    curve = estimate_autocorrelation(env, 5 * TC, n_boot=0)
    assert curve.abs_at(TC) == pytest.approx(math.exp(-1), abs=0.05)
    assert env.intensity() == pytest.approx(1.0, abs=0.08)


def test_thermal_long_lag_decay():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=5)
    curve = estimate_autocorrelation(env, 10 * TC, n_boot=0)
    assert curve.abs_at(10 * TC) < 0.05


def test_thermal_circular_symmetry():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=7)
    v = env.valid()
    pseudo = abs(np.mean(v**2)) / np.mean(np.abs(v) ** 2)
    # <E^2> should vanish; allow 3x the n^-1/2 estimator scale for the
    # correlated series (n_eff ~ duration / Tc)
    n_eff = GRID.duration / TC
    assert pseudo < 3.0 * 2.0 / math.sqrt(n_eff)


def test_thermal_stationarity_between_halves():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=13)
    v = np.abs(env.valid()) ** 2
    half = v.size // 2
    a, b = v[:half], v[half:]
    n_eff = half * GRID.dt / TC
    sigma = np.std(v) / math.sqrt(n_eff)
    assert abs(a.mean() - b.mean()) < 3.0 * sigma * math.sqrt(2)


def test_thermal_reproducibility_bit_identical():
    model = CoherenceModel("lorentzian", TC)
    a = make_thermal_envelope(model, GRID, seed=42)
    b = make_thermal_envelope(model, GRID, seed=42)
    assert np.array_equal(a.samples, b.samples)
    c = make_thermal_envelope(model, GRID, seed=43)
    assert not np.array_equal(a.samples, c.samples)


def test_phase_diffusion_constant_modulus():
    model = CoherenceModel("phase-diffusion", TC, I0=2.5)
    env = make_phase_diffusion_envelope(model, GRID, seed=1)
    np.testing.assert_allclose(np.abs(env.samples) ** 2, 2.5, rtol=1e-12)


def test_phase_diffusion_needs_matching_kind():
    with pytest.raises(ValueError):
        make_phase_diffusion_envelope(CoherenceModel("lorentzian", TC), GRID, seed=1)


def test_phase_diffusion_ensemble_mean_vanishes():
    # oracle: ensemble mean over independent seeds, against its own stderr
    grid = SampleGrid(0.1e-9, 2000)
    model = CoherenceModel("phase-diffusion", TC)
    means = np.array(
        [make_phase_diffusion_envelope(model, grid, seed=s).samples.mean() for s in range(120)]
    )
    sigma = means.std(ddof=1) / math.sqrt(means.size)
    assert abs(means.mean()) < 3.0 * sigma + 1e-12


def test_phase_diffusion_autocorrelation_target():
    env = make_phase_diffusion_envelope(CoherenceModel("phase-diffusion", TC), GRID, seed=9)
    curve = estimate_autocorrelation(env, 4 * TC, n_boot=0)
    assert curve.abs_at(TC) == pytest.approx(math.exp(-1), abs=0.05)


def test_pulse_template_unit_energy():
    for shape in ("gaussian", "box"):
        f = pulse_template(shape, 1e-9, 0.05e-9)
        assert np.sum(f**2) * 0.05e-9 == pytest.approx(1.0, rel=1e-9)


def test_pulse_train_profile_normalization_per_pulse():
    grid = SampleGrid(0.05e-9, 20_000)
    prof = pulse_train_profile("gaussian", 0.1e-9, 50e-9, 10, grid)
    # non-overlapping unit-energy pulses: total energy equals the pulse count
    assert np.sum(prof**2) * grid.dt == pytest.approx(10.0, rel=1e-6)


def test_pulse_train_independent_amplitudes_uncorrelated():
    grid = SampleGrid(0.125e-9, 1_600_200)
    spec = PulseTrainSpec("gaussian", 1e-9, 20e-9, 10_000)
    env = make_pulse_train(spec, grid, seed=21)
    # read back the pulse-peak amplitudes at the known centers
    idx = (np.round(((np.arange(10_000) + 0.5) * 20e-9) / grid.dt)).astype(int)
    peak = pulse_template("gaussian", 1e-9, grid.dt).max()
    amps = env.samples[idx] / peak
    lag1 = np.mean(amps[1:] * np.conj(amps[:-1]))
    sigma = np.mean(np.abs(amps) ** 2) / math.sqrt(amps.size - 1)
    assert abs(lag1) < 3.0 * sigma
    assert np.mean(np.abs(amps) ** 2) == pytest.approx(1.0, rel=0.05)


def test_pulse_train_triangular_correlations_match():
    # oracle: sample correlations of the generated amplitude sequence
    m = 5
    n_pulses = 20_000
    iq = triangular_correlation(1.0, m)
    grid = SampleGrid(0.125e-9, 3_200_200)
    spec = PulseTrainSpec("gaussian", 1e-9, 20e-9, n_pulses, 1.0, iq)
    env = make_pulse_train(spec, grid, seed=33)
    idx = (np.round(((np.arange(n_pulses) + 0.5) * 20e-9) / grid.dt)).astype(int)
    peak = pulse_template("gaussian", 1e-9, grid.dt).max()
    amps = env.samples[idx] / peak
    for q in (1, 3, 5):
        got = np.mean(amps[q:] * np.conj(amps[:-q]))
        want = 1.0 - q / (m + 1.0)
        # 5% of the correlation scale I0 (the per-lag estimator noise floor
        # is lag-independent, so a tolerance relative to I_q would be
        # unattainable at the largest q)
        assert abs(got.real - want) < 0.05
        assert abs(got.imag) < 0.05
    assert abs(np.mean(amps[6:] * np.conj(amps[:-6]))) < 0.05


def test_pulse_train_spec_validation():
    with pytest.raises(PulseOverlapError):
        PulseTrainSpec("gaussian", 11e-9, 20e-9, 10)
    bad = np.array([0.5, 1.0, 0.4])  # breaks I_{-q} = conj(I_q)
    with pytest.raises(ValueError):
        PulseTrainSpec("gaussian", 1e-9, 20e-9, 10, 1.0, bad)
    # a valid Hermitian sequence that is not PSD
    nonpsd = np.array([0.99, 1.0, 0.99])
    with pytest.raises(CorrelationNotPSDError):
        PulseTrainSpec("gaussian", 1e-9, 20e-9, 10, 1.0, nonpsd)


def test_pulse_train_grid_checks():
    spec = PulseTrainSpec("gaussian", 1e-9, 20e-9, 10)
    with pytest.raises(GridTooCoarseError):
        make_pulse_train(spec, SampleGrid(0.25e-9, 1000), seed=0)  # 8-sample rule
    with pytest.raises(TraceTooShortError):
        make_pulse_train(spec, SampleGrid(0.1e-9, 1000), seed=0)


def test_toeplitz_correlation_layout():
    iq = np.array([0.25 - 0.1j, 0.5, 1.0, 0.5, 0.25 + 0.1j])
    top = toeplitz_correlation(iq)
    assert top[0, 0] == 1.0
    assert top[0, 1] == 0.5
    assert top[0, 2] == 0.25 + 0.1j
    assert np.allclose(top, top.conj().T)


def test_autocorrelation_constant_envelope_is_flat():
    grid = SampleGrid(1e-9, 4000)
    env = SampledEnvelope(np.full(grid.n, 2.0 + 1.0j), grid)
    curve = estimate_autocorrelation(env, 200e-9, n_boot=0)
    np.testing.assert_allclose(np.abs(curve.gamma), 1.0, rtol=1e-12)


def test_autocorrelation_max_lag_guard():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=2)
    with pytest.raises(TraceTooShortError):
        estimate_autocorrelation(env, GRID.duration / 3, n_boot=0)


def test_autocorrelation_stderr_brackets_unit_bound():
    env = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=17)
    curve = estimate_autocorrelation(env, 5 * TC, n_boot=40, seed=1)
    assert curve.stderr[0] == 0.0
    assert np.all(np.abs(curve.gamma) <= 1.0 + 3.0 * curve.stderr + 1e-12)
    assert np.all(curve.stderr[1:] > 0)


def test_cross_coherence_of_independent_fields_is_noise():
    model = CoherenceModel("lorentzian", TC)
    a = make_thermal_envelope(model, GRID, seed=101)
    b = make_thermal_envelope(model, GRID, seed=202)
    g12, err = estimate_cross_coherence(a, b, n_boot=60, seed=4)
    assert abs(g12) < 3.0 * err


def test_cross_coherence_of_identical_fields_is_one():
    a = make_thermal_envelope(CoherenceModel("lorentzian", TC), GRID, seed=55)
    g12, _ = estimate_cross_coherence(a, a)
    assert abs(g12) == pytest.approx(1.0, rel=1e-12)


def test_integrated_coherence_time_models():
    assert integrated_coherence_time(CoherenceModel("lorentzian", TC)) == pytest.approx(2 * TC)
    assert integrated_coherence_time(CoherenceModel("gaussian", TC)) == pytest.approx(
        math.sqrt(math.pi) * TC
    )
