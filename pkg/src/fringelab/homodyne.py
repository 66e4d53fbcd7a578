"""Balanced homodyne and direct intensity detection on sampled envelopes.

Currents follow i(t) = Int k(t - tau) s(tau) dtau with a causal, nonnegative
response kernel k; the integrand s is 2*Re(conj(LO_envelope)*E) for homodyne
and |E|^2 for direct detection.  Vacuum (shot) noise, when enabled, is a white
Gaussian quadrature record with per-sample variance dB/dt, calibrated so the
kernel-filtered record has variance Q2*dB.

Balanced-detector subtraction is ideal and the LO coherence time is treated
as infinite; quantum inputs are represented by Gaussian surrogates that match
first and second moments, which is exact for every observable quadratic in
the currents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import oaconvolve

from .errors import (
    PolarizationMismatchError,
    ProfileMismatchError,
    TraceTooShortError,
)
from .fields import SampleGrid, SampledEnvelope, trial_rng
from .optics import PolarizedPair


@dataclass(frozen=True)
class LocalOscillator:
    """Strong reference field: amplitude |E|, phase phi, optional profile.

    profile is a real sampled temporal mode (grid-length) for pulsed LOs;
    None means cw (constant unit profile).  The profile selects which signal
    mode the detection measures.
    """

    amplitude: float
    phase: float = 0.0
    pol: str = "scalar"
    profile: np.ndarray | None = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("LO amplitude must be nonnegative")
        if self.profile is not None:
            prof = np.asarray(self.profile, dtype=float)
            object.__setattr__(self, "profile", prof)

    def shifted(self, dphase: float) -> "LocalOscillator":
        return LocalOscillator(self.amplitude, self.phase + dphase, self.pol, self.profile)

    def envelope_on(self, grid: SampleGrid) -> np.ndarray:
        prof = self.profile
        if prof is None:
            prof = np.ones(grid.n)
        elif prof.shape != (grid.n,):
            raise ProfileMismatchError(
                f"LO profile length {prof.shape} does not match grid n={grid.n}"
            )
        return self.amplitude * np.exp(1j * self.phase) * prof


@dataclass
class ResponseKernel:
    """Nonnegative detector impulse response k(tau) with width T_R.

    Q1 = Int k dtau and Q2 = Int k^2 dtau are computed once and cached.
    """

    kind: str
    samples: np.ndarray
    dt: float
    width: float
    q1: float = field(init=False)
    q2: float = field(init=False)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("kernel samples must be a nonempty 1-d array")
        if np.any(self.samples < -1e-15 * max(1.0, self.samples.max(initial=0.0))):
            raise ValueError("kernel must be nonnegative")
        if not (self.dt > 0 and self.width > 0):
            raise ValueError("dt and width must be positive")
        self.q1 = float(self.samples.sum() * self.dt)
        self.q2 = float(np.sum(self.samples**2) * self.dt)
        if not (self.q1 > 0 and self.q2 > 0):
            raise ValueError("kernel must have positive Q1 and Q2")

    @classmethod
    def box(cls, T: float, dt: float) -> "ResponseKernel":
        """Unit-area box of duration T (snapped to whole samples)."""
        w = max(1, int(round(T / dt)))
        return cls("box", np.full(w, 1.0 / (w * dt)), dt, w * dt)

    @classmethod
    def exponential(cls, T_R: float, dt: float, n_widths: float = 20.0) -> "ResponseKernel":
        """One-pole response exp(-tau/T_R)/T_R, truncated at n_widths*T_R."""
        m = max(2, int(math.ceil(n_widths * T_R / dt)))
        tau = np.arange(m) * dt
        return cls("exponential", np.exp(-tau / T_R) / T_R, dt, T_R)

    @classmethod
    def from_samples(cls, samples, dt: float, width: float | None = None) -> "ResponseKernel":
        samples = np.asarray(samples, dtype=float)
        if width is None:
            width = samples.size * dt
        return cls("custom", samples, dt, width)

    def autocorrelation(self, lag: float) -> float:
        """Int k(t) k(t + lag) dt; closed form for box/exponential kinds."""
        x = abs(lag)
        if self.kind == "box":
            T = self.width
            return max(0.0, 1.0 - x / T) / T
        if self.kind == "exponential":
            return math.exp(-x / self.width) / (2.0 * self.width)
        return self.autocorrelation_discrete(lag)

    def autocorrelation_discrete(self, lag: float) -> float:
        """Same overlap integral evaluated on the sampled kernel."""
        d = int(round(abs(lag) / self.dt))
        if d >= self.samples.size:
            return 0.0
        return float(np.dot(self.samples[d:], self.samples[: self.samples.size - d]) * self.dt)

    def convolved_with(self, other: "ResponseKernel") -> "ResponseKernel":
        """Composite response of two stages in series (e.g. detector then averager)."""
        if abs(self.dt - other.dt) > 1e-12 * self.dt:
            raise ValueError("kernels must share one sample step")
        samples = oaconvolve(self.samples, other.samples) * self.dt
        return ResponseKernel.from_samples(samples, self.dt, self.width + other.width)


@dataclass(frozen=True)
class NoiseModel:
    """Detection noise: 'off' (classical) or 'vacuum' with bandwidth dB (Hz-like,
    quadrature variance per unit time)."""

    mode: str = "off"
    bandwidth: float = 0.0

    def __post_init__(self):
        if self.mode not in ("off", "vacuum"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.mode == "vacuum" and not self.bandwidth > 0:
            raise ValueError("vacuum noise needs a positive bandwidth")
        if self.bandwidth < 0:
            raise ValueError("bandwidth must be nonnegative")

    @classmethod
    def off(cls) -> "NoiseModel":
        return cls("off", 0.0)

    @classmethod
    def vacuum(cls, bandwidth: float) -> "NoiseModel":
        return cls("vacuum", bandwidth)

    def check_grid(self, grid: SampleGrid):
        nyquist = 1.0 / (2.0 * grid.dt)
        if self.bandwidth > nyquist * (1 + 1e-12):
            raise ValueError(
                f"noise bandwidth {self.bandwidth:g} exceeds Nyquist {nyquist:g} of the grid"
            )


@dataclass
class PhotocurrentTrace:
    """Real sampled photocurrent with grid metadata and provenance."""

    samples: np.ndarray
    grid: SampleGrid
    valid_from: int = 0
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != (self.grid.n,):
            raise ValueError("trace length does not match grid")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trace contains non-finite samples")
        if not 0 <= self.valid_from < self.grid.n:
            raise ValueError("empty valid region")

    def valid(self) -> np.ndarray:
        return self.samples[self.valid_from :]

    @property
    def valid_duration(self) -> float:
        return (self.grid.n - self.valid_from) * self.grid.dt


def _check_kernel_grid(kernel: ResponseKernel, grid: SampleGrid):
    if abs(kernel.dt - grid.dt) > 1e-12 * grid.dt:
        raise ValueError(f"kernel dt {kernel.dt:g} does not match grid dt {grid.dt:g}")
    if kernel.samples.size >= grid.n:
        raise TraceTooShortError(
            f"kernel ({kernel.samples.size} samples) is wider than the trace ({grid.n})"
        )


def _filtered(x: np.ndarray, kernel: ResponseKernel) -> np.ndarray:
    """Causal convolution (k * x)(t) * dt, same length as x."""
    return oaconvolve(x, kernel.samples)[: x.size] * kernel.dt


def _vacuum_record(noise: NoiseModel, grid: SampleGrid, rng: np.random.Generator) -> np.ndarray:
    # per-sample variance dB/dt makes the kernel-filtered variance equal Q2*dB
    return rng.standard_normal(grid.n) * math.sqrt(noise.bandwidth / grid.dt)


def _detect(signal, grid, kernel, noise, noise_amplitudes, seed, valid_from, provenance):
    """Shared detection core: filter the integrand, add per-LO shot noise."""
    _check_kernel_grid(kernel, grid)
    current = _filtered(signal, kernel)
    if noise is not None and noise.mode == "vacuum":
        noise.check_grid(grid)
        for path, amplitude in enumerate(noise_amplitudes):
            if amplitude == 0.0:
                continue
            rng = trial_rng(seed, path)
            current = current + amplitude * _filtered(_vacuum_record(noise, grid, rng), kernel)
    return PhotocurrentTrace(
        current,
        grid,
        valid_from=min(valid_from + kernel.samples.size - 1, grid.n - 1),
        provenance=provenance,
    )


def homodyne_current(
    env: SampledEnvelope,
    lo: LocalOscillator,
    kernel: ResponseKernel,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> PhotocurrentTrace:
    """Balanced homodyne current i = |E_lo| (k * X_phi) (+ shot noise).

    X_phi(t) = E e^{-i phi} + E* e^{i phi} on the envelope grid (carrier
    absorbed); a pulsed LO profile weights the integrand and thereby selects
    the matching temporal mode.
    """
    if lo.pol != env.pol:
        raise PolarizationMismatchError(
            f"LO pol {lo.pol!r} does not match field pol {env.pol!r}"
        )
    s = 2.0 * np.real(np.conj(lo.envelope_on(env.grid)) * env.samples)
    corr = env.meta.get("correlation_time", 0.0) + kernel.width
    return _detect(
        s,
        env.grid,
        kernel,
        noise,
        [lo.amplitude],
        seed,
        env.valid_from,
        {
            "op": "homodyne_current",
            "lo_phase": lo.phase,
            "lo_amplitude": lo.amplitude,
            "correlation_time": corr,
        },
    )


def dual_lo_current(
    pair: PolarizedPair,
    lo_x: LocalOscillator,
    lo_y: LocalOscillator,
    kernel: ResponseKernel,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> PhotocurrentTrace:
    """Dual-LO balanced homodyne: quadratures of both polarizations add.

    Cross-polarization terms are exactly absent; each LO contributes its own
    independent vacuum record when noise is on.  With lo_y.amplitude == 0 this
    reduces bit-exactly to homodyne_current on the x component.
    """
    if lo_x.pol != "x" or lo_y.pol != "y":
        raise PolarizationMismatchError(
            f"need LO pols (x, y), got ({lo_x.pol!r}, {lo_y.pol!r})"
        )
    grid = pair.grid
    s = 2.0 * np.real(np.conj(lo_x.envelope_on(grid)) * pair.ex.samples)
    s += 2.0 * np.real(np.conj(lo_y.envelope_on(grid)) * pair.ey.samples)
    corr = (
        max(
            pair.ex.meta.get("correlation_time", 0.0),
            pair.ey.meta.get("correlation_time", 0.0),
        )
        + kernel.width
    )
    return _detect(
        s,
        grid,
        kernel,
        noise,
        [lo_x.amplitude, lo_y.amplitude],
        seed,
        pair.valid_from,
        {
            "op": "dual_lo_current",
            "lo_phases": (lo_x.phase, lo_y.phase),
            "lo_amplitudes": (lo_x.amplitude, lo_y.amplitude),
            "correlation_time": corr,
        },
    )


def direct_intensity_current(
    target: SampledEnvelope | PolarizedPair, kernel: ResponseKernel
) -> PhotocurrentTrace:
    """Classical direct detection i = (k * |E|^2); no LO, no shot noise."""
    if isinstance(target, PolarizedPair):
        s = np.abs(target.ex.samples) ** 2 + np.abs(target.ey.samples) ** 2
        grid, valid_from = target.grid, target.valid_from
        corr = max(
            target.ex.meta.get("correlation_time", 0.0),
            target.ey.meta.get("correlation_time", 0.0),
        )
    else:
        s = np.abs(target.samples) ** 2
        grid, valid_from = target.grid, target.valid_from
        corr = target.meta.get("correlation_time", 0.0)
    return _detect(
        s,
        grid,
        kernel,
        None,
        [],
        0,
        valid_from,
        {"op": "direct_intensity_current", "correlation_time": corr + kernel.width},
    )


@dataclass
class SecondMomentModel:
    """Exact 4-mode quadrature covariance for the split single photon.

    Basis order is (X1, X2, X1v, X2v): the two signal temporal modes plus the
    vacuum modes admitted by the splitter.  Every observable quadratic in the
    currents follows from this covariance; Gaussian surrogate sampling is
    available for Monte-Carlo style runs.
    """

    covariance: np.ndarray
    lo_x: LocalOscillator
    lo_y: LocalOscillator
    kernel: ResponseKernel
    delta_T: float
    theta: float

    def __post_init__(self):
        w = np.linalg.eigvalsh(self.covariance)
        if w.min() < -1e-12 * max(1.0, w.max()):
            raise ValueError(f"covariance not PSD (min eigenvalue {w.min():g})")

    def integrated_power(self) -> float:
        """Int <i^2> dt predicted from the covariance (arbitrary units)."""
        c = self.covariance
        e1, e2 = self.lo_x.amplitude, self.lo_y.amplitude
        k0 = self.kernel.autocorrelation(0.0)
        kd = self.kernel.autocorrelation(self.delta_T)
        # detected combinations: A = e1*(X1 + X2v), B = e2*(X2 + X1v)
        var_a = e1**2 * (c[0, 0] + c[3, 3] + 2.0 * c[0, 3])
        var_b = e2**2 * (c[1, 1] + c[2, 2] + 2.0 * c[1, 2])
        cov_ab = e1 * e2 * (c[0, 1] + c[0, 2] + c[3, 1] + c[3, 2])
        return (k0 * (var_a + var_b) + 2.0 * kd * cov_ab) / 4.0

    def sample_current(self, seed: int = 0) -> PhotocurrentTrace:
        """Gaussian surrogate draw of one detected single-photon pulse pair."""
        rng = trial_rng(seed)
        x = rng.multivariate_normal(np.zeros(4), self.covariance, method="cholesky")
        k = self.kernel.samples
        d = int(round(self.delta_T / self.kernel.dt))
        n = k.size + d
        first = np.zeros(n)
        second = np.zeros(n)
        first[d : d + k.size] = k  # k(t): response to the undelayed pulse
        second[: k.size] = k  # k(t + delta_T)
        e1, e2 = self.lo_x.amplitude, self.lo_y.amplitude
        i = (e1 * (x[0] + x[3]) * first + e2 * (x[1] + x[2]) * second) / 2.0
        grid = SampleGrid(self.kernel.dt, n)
        return PhotocurrentTrace(
            i, grid, provenance={"op": "single_photon_sample", "correlation_time": self.kernel.width}
        )


def single_photon_moments(
    lo_x: LocalOscillator,
    lo_y: LocalOscillator,
    kernel: ResponseKernel,
    delta_T: float,
    theta: float,
) -> SecondMomentModel:
    """Covariance of (X1, X2, X1v, X2v) for (|1,0> + e^{i theta}|0,1>)/sqrt2.

    Signal-mode variances are 2, vacuum-mode variances 1, and the only
    correlation is <X1(phi1) X2(phi2)> = cos(theta + phi1 - phi2).
    """
    cov = np.diag([2.0, 2.0, 1.0, 1.0])
    c = math.cos(theta + lo_x.phase - lo_y.phase)
    cov[0, 1] = cov[1, 0] = c
    delta_T = round(delta_T / kernel.dt) * kernel.dt
    return SecondMomentModel(cov, lo_x, lo_y, kernel, delta_T, theta)


def quantum_cw_current(
    photon_rate: float,
    gamma12: complex,
    lo_x: LocalOscillator,
    lo_y: LocalOscillator,
    kernel: ResponseKernel,
    noise: NoiseModel,
    grid: SampleGrid,
    seed: int = 0,
) -> PhotocurrentTrace:
    """Semiclassical surrogate of dual-LO homodyne on a weak cw field.

    Signal quadrature records are white with <X^2> = R + dB and equal-time
    cross correlation R|gamma|cos(dphi + phase(gamma)); each LO port adds an
    independent vacuum record with <X^2> = dB.  The i^2-fringe then follows
    V = |gamma| N / (N + 2) with N = R/dB.
    """
    if noise.mode != "vacuum":
        raise ValueError("quantum_cw_current requires vacuum noise mode")
    noise.check_grid(grid)
    if photon_rate < 0:
        raise ValueError("photon rate must be nonnegative")
    g = complex(gamma12)
    if abs(g) > 1 + 1e-12:
        raise ValueError("|gamma12| must not exceed 1")
    _check_kernel_grid(kernel, grid)
    dB = noise.bandwidth
    dt = grid.dt
    var = (photon_rate + dB) / dt
    cross = photon_rate * abs(g) * math.cos(lo_x.phase - lo_y.phase + math.atan2(g.imag, g.real))
    cross /= dt
    rng = trial_rng(seed)
    a = rng.standard_normal(grid.n)
    b = rng.standard_normal(grid.n)
    l11 = math.sqrt(var)
    l21 = cross / l11
    l22 = math.sqrt(max(var - l21**2, 0.0))
    x_sig_x = l11 * a
    x_sig_y = l21 * a + l22 * b
    sigma_v = math.sqrt(dB / dt)
    x_vac_x = rng.standard_normal(grid.n) * sigma_v
    x_vac_y = rng.standard_normal(grid.n) * sigma_v
    s = (
        lo_x.amplitude * (x_sig_x + x_vac_x) + lo_y.amplitude * (x_sig_y + x_vac_y)
    ) / math.sqrt(2.0)
    current = _filtered(s, kernel)
    return PhotocurrentTrace(
        current,
        grid,
        valid_from=min(kernel.samples.size - 1, grid.n - 1),
        provenance={
            "op": "quantum_cw_current",
            "photon_rate": photon_rate,
            "bandwidth": dB,
            "correlation_time": kernel.width,
        },
    )
