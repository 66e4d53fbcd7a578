"""Stochastic optical field synthesis and empirical coherence estimation.

All fields are complex baseband envelopes on a uniform time grid; the optical
carrier exp(-i*omega0*t) is factored out and tracked as metadata only.  Times
are in seconds throughout; intensities are in arbitrary units (only ratios
ever enter a visibility).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft
from scipy.integrate import trapezoid

from .errors import (
    CorrelationNotPSDError,
    GridTooCoarseError,
    PulseOverlapError,
    TraceTooShortError,
)

THERMAL_KINDS = ("lorentzian", "gaussian")
PHASE_DIFFUSION = "phase-diffusion"


def trial_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for one Monte-Carlo trial.

    Uses numpy's SeedSequence spawn keys as a splittable counter scheme: the
    stream depends only on (seed, path), never on scheduling order, so
    ensembles may run concurrently and still reproduce bit-identically.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(path)))


@dataclass(frozen=True)
class SampleGrid:
    """Uniform time grid: n samples spaced dt seconds, starting at t0."""

    dt: float
    n: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n < 2:
            raise ValueError(f"need at least 2 samples, got {self.n}")

    @property
    def duration(self) -> float:
        return self.n * self.dt

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def index_of(self, delay: float) -> int:
        """Snap a time offset to an integer number of samples."""
        return int(round(delay / self.dt))


@dataclass(frozen=True)
class CoherenceModel:
    """First-order coherence model of a stationary random field.

    kind is one of 'lorentzian', 'gaussian' or 'phase-diffusion'.  Tc is
    pinned by |gamma(Tc)| = 1/e for every kind; I0 is the mean intensity
    <|E|^2>.
    """

    kind: str
    Tc: float
    I0: float = 1.0

    def __post_init__(self):
        if self.kind not in THERMAL_KINDS + (PHASE_DIFFUSION,):
            raise ValueError(f"unknown coherence model kind {self.kind!r}")
        if not self.Tc > 0:
            raise ValueError(f"Tc must be positive, got {self.Tc}")
        if self.I0 < 0:
            raise ValueError(f"I0 must be nonnegative, got {self.I0}")

    def gamma(self, tau):
        """Normalized autocorrelation gamma(tau) (real for these models)."""
        a = np.abs(np.asarray(tau, dtype=float)) / self.Tc
        if self.kind == "gaussian":
            return np.exp(-(a**2))
        # lorentzian-spectrum field and Wiener-phase diffusion share exp(-|tau|/Tc)
        return np.exp(-a)

    def spectrum(self, omega):
        """Baseband power spectrum S(w) = Int gamma(tau) e^{i w tau} dtau."""
        w = np.asarray(omega, dtype=float)
        if self.kind == "gaussian":
            return math.sqrt(math.pi) * self.Tc * np.exp(-((w * self.Tc) ** 2) / 4.0)
        return 2.0 * self.Tc / (1.0 + (w * self.Tc) ** 2)


@dataclass
class SampledEnvelope:
    """Complex baseband field envelope on a uniform grid.

    valid_from marks the first trustworthy sample; upstream operations that
    shift or convolve data advance it instead of shortening arrays.
    """

    samples: np.ndarray
    grid: SampleGrid
    omega0: float = 0.0
    pol: str = "scalar"
    valid_from: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.n,):
            raise ValueError(
                f"samples length {self.samples.shape} does not match grid n={self.grid.n}"
            )
        if not 0 <= self.valid_from < self.grid.n:
            raise ValueError(f"valid_from {self.valid_from} outside grid")

    def valid(self) -> np.ndarray:
        return self.samples[self.valid_from :]

    def intensity(self) -> float:
        """Mean |E|^2 over the valid region."""
        v = self.valid()
        return float(np.mean(np.abs(v) ** 2))

    def with_samples(self, samples, valid_from=None, **meta) -> "SampledEnvelope":
        return SampledEnvelope(
            samples,
            self.grid,
            omega0=self.omega0,
            pol=meta.pop("pol", self.pol),
            valid_from=self.valid_from if valid_from is None else valid_from,
            meta={**self.meta, **meta},
        )


@dataclass(frozen=True)
class PulseTrainSpec:
    """Periodic train of identical normalized pulses with random amplitudes.

    shape/width describe the profile f (unit energy: Int f^2 dt = 1);
    Tp is the pulse separation and correlation holds I_q = <A_j A*_{j+q}>
    for q = -M..M (None means independent pulses, I_q = I0*delta_q0).
    """

    shape: str
    width: float
    Tp: float
    n_pulses: int
    mean_intensity: float = 1.0
    correlation: np.ndarray | None = None

    def __post_init__(self):
        if self.shape not in ("gaussian", "box"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if not (self.width > 0 and self.Tp > 0):
            raise ValueError("width and Tp must be positive")
        if self.n_pulses < 1:
            raise ValueError("need at least one pulse")
        if self.mean_intensity < 0:
            raise ValueError("mean_intensity must be nonnegative")
        if self.width >= self.Tp / 2:
            raise PulseOverlapError(
                f"pulse width {self.width} must stay below Tp/2 = {self.Tp / 2}"
            )
        if self.correlation is not None:
            iq = np.asarray(self.correlation, dtype=complex)
            if iq.ndim != 1 or iq.size % 2 != 1:
                raise ValueError("correlation must be a 1-d array of odd length (q=-M..M)")
            object.__setattr__(self, "correlation", iq)
            m = iq.size // 2
            if not np.allclose(iq[::-1].conj(), iq, rtol=1e-12, atol=1e-12):
                raise ValueError("correlation must satisfy I_{-q} = conj(I_q)")
            if abs(iq[m] - self.mean_intensity) > 1e-9 * max(1.0, abs(self.mean_intensity)):
                raise ValueError("correlation at q=0 must equal mean_intensity")
            top = toeplitz_correlation(iq)
            w = np.linalg.eigvalsh(top)
            if w.min() < -1e-10 * max(1.0, w.max()):
                raise CorrelationNotPSDError(
                    f"correlation Toeplitz matrix has negative eigenvalue {w.min():g}"
                )

    @property
    def span(self) -> int:
        """Correlation half-width M (0 for independent pulses)."""
        return 0 if self.correlation is None else self.correlation.size // 2


def toeplitz_correlation(iq: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrix R[j,k] = I_{k-j} from I_q, q = -M..M."""
    iq = np.asarray(iq, dtype=complex)
    m = iq.size // 2
    dim = iq.size
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        for k in range(dim):
            q = k - j
            out[j, k] = iq[m + q] if abs(q) <= m else 0.0
    return out


def triangular_correlation(I0: float, M: int) -> np.ndarray:
    """I_q = I0*(1 - |q|/(M+1)) for q = -M..M (a simple admissible family)."""
    q = np.arange(-M, M + 1)
    return I0 * (1.0 - np.abs(q) / (M + 1.0)) + 0j


def pulse_template(shape: str, width: float, dt: float) -> np.ndarray:
    """One normalized pulse sampled around its center (sum f^2 * dt = 1)."""
    if shape == "gaussian":
        half = int(math.ceil(8.0 * width / dt))
        x = np.arange(-half, half + 1) * dt
        f = np.exp(-(x**2) / (2.0 * width**2))
    else:  # box
        half = max(1, int(round(width / (2.0 * dt))))
        f = np.ones(2 * half + 1)
    norm = math.sqrt(float(np.sum(f**2)) * dt)
    return f / norm


def pulse_train_profile(
    shape: str,
    width: float,
    Tp: float,
    n_pulses: int,
    grid: SampleGrid,
    delay: float = 0.0,
) -> np.ndarray:
    """Real train profile sum_j f(t - c_j - delay) with c_j = t0 + (j+1/2)Tp.

    Each pulse carries unit energy; pulses must not overlap.  Used both for
    synthesized fields and for mode-matched local-oscillator profiles, so both
    sides snap pulse centers to the same grid samples.
    """
    tmpl = pulse_template(shape, width, grid.dt)
    half = tmpl.size // 2
    out = np.zeros(grid.n)
    for j in range(n_pulses):
        center = (j + 0.5) * Tp + delay
        idx = int(round(center / grid.dt))
        lo, hi = idx - half, idx + half + 1
        if lo < 0 or hi > grid.n:
            raise TraceTooShortError(
                f"pulse {j} at {center:g}s does not fit on the grid (duration {grid.duration:g}s)"
            )
        out[lo:hi] += tmpl
    return out


def _pulse_amplitudes(spec: PulseTrainSpec, rng: np.random.Generator) -> np.ndarray:
    """Complex Gaussian A_j with <A_j A*_{j+q}> = I_q.

    Uses the banded lower Cholesky factor of the Toeplitz correlation matrix,
    O(n*M) in time and memory; falls back to a dense eigendecomposition for
    PSD-but-singular correlations.
    """
    n = spec.n_pulses
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    if spec.correlation is None:
        return math.sqrt(spec.mean_intensity) * z
    iq = spec.correlation
    m = min(spec.span, n - 1)
    from scipy.linalg import cholesky_banded

    # lower banded storage: row i holds subdiagonal i, constant I_{-i}
    ab = np.zeros((m + 1, n), dtype=complex)
    for i in range(m + 1):
        ab[i, : n - i] = np.conj(iq[spec.span + i])
    try:
        lower = cholesky_banded(ab, lower=True)
        out = np.zeros(n, dtype=complex)
        for i in range(m + 1):
            out[i:] += lower[i, : n - i] * z[: n - i]
        return out
    except np.linalg.LinAlgError:
        cov = np.zeros((n, n), dtype=complex)
        for q in range(-m, m + 1):
            cov += iq[spec.span + q] * np.eye(n, k=q)
        w, v = np.linalg.eigh(cov)
        factor = v * np.sqrt(np.clip(w, 0.0, None))
        return factor @ z


def make_thermal_envelope(model: CoherenceModel, grid: SampleGrid, seed: int) -> SampledEnvelope:
    """Synthesize a circular-Gaussian field with autocorrelation I0*gamma(tau).

    White complex Gaussian noise is shaped by a spectral filter whose squared
    magnitude is the DFT of the circular target autocovariance, which makes
    the second-order statistics exact; a 10*Tc warm-up margin at each end is
    synthesized and discarded so the retained segment carries no wrap-around
    correlation.
    """
    if model.kind not in THERMAL_KINDS:
        raise ValueError(f"thermal synthesis needs a lorentzian/gaussian model, got {model.kind!r}")
    if not model.I0 > 0:
        raise ValueError("thermal synthesis needs I0 > 0")
    if grid.dt > model.Tc / 20 * (1 + 1e-9):
        raise GridTooCoarseError(
            f"dt={grid.dt:g}s too coarse for Tc={model.Tc:g}s (need dt <= Tc/20)"
        )
    pad = int(math.ceil(10.0 * model.Tc / grid.dt))
    m = sp_fft.next_fast_len(grid.n + 2 * pad)  # excess length only widens the margin
    k = np.arange(m)
    tau = np.minimum(k, m - k) * grid.dt
    psd = sp_fft.fft(model.I0 * model.gamma(tau)).real
    np.clip(psd, 0.0, None, out=psd)
    rng = trial_rng(seed)
    white = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / math.sqrt(2)
    shaped = sp_fft.ifft(sp_fft.fft(white) * np.sqrt(psd))
    samples = np.ascontiguousarray(shaped[pad : pad + grid.n])
    return SampledEnvelope(
        samples,
        grid,
        pol="scalar",
        meta={"model": model.kind, "Tc": model.Tc, "I0": model.I0, "correlation_time": model.Tc},
    )


def make_phase_diffusion_envelope(
    model: CoherenceModel, grid: SampleGrid, seed: int
) -> SampledEnvelope:
    """Constant-modulus field sqrt(I0)*exp(i*phi(t)) with Wiener phase.

    Phase increments are i.i.d. Gaussian with variance 2*dt/Tc per step, which
    gives gamma(tau) = exp(-|tau|/Tc) so that |gamma(Tc)| = 1/e.  The initial
    phase is uniform, making the ensemble mean vanish.
    """
    if model.kind != PHASE_DIFFUSION:
        raise ValueError(f"expected a phase-diffusion model, got {model.kind!r}")
    if not model.I0 > 0:
        raise ValueError("phase-diffusion synthesis needs I0 > 0")
    if grid.dt > model.Tc / 20 * (1 + 1e-9):
        raise GridTooCoarseError(
            f"dt={grid.dt:g}s too coarse for Tc={model.Tc:g}s (need dt <= Tc/20)"
        )
    rng = trial_rng(seed)
    phase = np.empty(grid.n)
    phase[0] = rng.uniform(0.0, 2.0 * math.pi)
    steps = rng.standard_normal(grid.n - 1) * math.sqrt(2.0 * grid.dt / model.Tc)
    np.cumsum(steps, out=phase[1:])
    phase[1:] += phase[0]
    samples = math.sqrt(model.I0) * np.exp(1j * phase)
    return SampledEnvelope(
        samples,
        grid,
        pol="scalar",
        meta={"model": model.kind, "Tc": model.Tc, "I0": model.I0, "correlation_time": model.Tc},
    )


def make_pulse_train(spec: PulseTrainSpec, grid: SampleGrid, seed: int) -> SampledEnvelope:
    """E(t) = sum_j A_j f(t - c_j) with Gaussian pulse amplitudes A_j.

    Correlated amplitudes are produced by factoring the banded Toeplitz matrix
    built from I_q and applying it to i.i.d. complex Gaussians, so the target
    correlations are exact for any admissible I_q.
    """
    if spec.width / grid.dt < 8:
        raise GridTooCoarseError(
            f"pulse width {spec.width:g}s needs >= 8 samples, dt={grid.dt:g}s"
        )
    if spec.n_pulses * spec.Tp > grid.duration:
        raise TraceTooShortError(
            f"{spec.n_pulses} pulses at Tp={spec.Tp:g}s exceed grid duration {grid.duration:g}s"
        )
    rng = trial_rng(seed)
    amps = _pulse_amplitudes(spec, rng)
    tmpl = pulse_template(spec.shape, spec.width, grid.dt)
    half = tmpl.size // 2
    out = np.zeros(grid.n, dtype=complex)
    for j in range(spec.n_pulses):
        idx = int(round((j + 0.5) * spec.Tp / grid.dt))
        lo, hi = idx - half, idx + half + 1
        if lo < 0 or hi > grid.n:
            raise TraceTooShortError(f"pulse {j} does not fit on the grid")
        out[lo:hi] += amps[j] * tmpl
    corr_time = max(spec.width, spec.span * spec.Tp)
    return SampledEnvelope(
        out,
        grid,
        pol="scalar",
        meta={
            "model": "pulse-train",
            "Tp": spec.Tp,
            "pulse_width": spec.width,
            "pulse_shape": spec.shape,
            "n_pulses": spec.n_pulses,
            "I0": spec.mean_intensity,
            "correlation_time": corr_time,
        },
    )


@dataclass
class GammaCurve:
    """Empirical normalized autocorrelation gamma(tau) with standard errors."""

    lags: np.ndarray
    gamma: np.ndarray
    stderr: np.ndarray

    def abs_at(self, tau: float) -> float:
        return float(np.interp(abs(tau), self.lags, np.abs(self.gamma)))


def _lagged_products_mean(x: np.ndarray, n_lags: int) -> np.ndarray:
    """Unbiased <x(t) conj(x(t-m))> for m = 0..n_lags via FFT."""
    n = x.size
    size = sp_fft.next_fast_len(n + n_lags)
    fx = sp_fft.fft(x, size)
    corr = sp_fft.ifft(fx * np.conj(fx), size)[: n_lags + 1]
    counts = n - np.arange(n_lags + 1)
    # ifft(F * conj(F))[m] = sum_t x[t+m] conj(x[t]); conjugate for <x(t) x*(t-m)>
    return np.conj(corr) / counts


def estimate_autocorrelation(
    env: SampledEnvelope,
    max_lag: float,
    n_boot: int = 60,
    block_time: float | None = None,
    seed: int = 0,
) -> GammaCurve:
    """Lag-windowed estimate of gamma(tau), self-normalized to gamma(0) = 1.

    Standard errors come from a moving-block bootstrap of the sample series;
    the default block length is 10*max_lag, capped at a quarter of the data.
    """
    x = env.valid()
    n = x.size
    dt = env.grid.dt
    n_lags = env.grid.index_of(max_lag)
    if n_lags * dt >= n * dt / 4:
        raise TraceTooShortError(
            f"max_lag {max_lag:g}s must stay below a quarter of the valid duration {n * dt:g}s"
        )
    raw = _lagged_products_mean(x, n_lags)
    gamma = raw / raw[0].real
    stderr = np.zeros(n_lags + 1)
    if n_boot > 0:
        if block_time is None:
            block_time = 10.0 * max_lag if max_lag > 0 else n * dt / 20
        block = int(np.clip(round(block_time / dt), 1, n // 4))
        rng = trial_rng(seed)
        reps = np.empty((n_boot, n_lags + 1))
        n_blocks = int(math.ceil(n / block))
        for b in range(n_boot):
            starts = rng.integers(0, n - block + 1, size=n_blocks)
            resampled = np.concatenate([x[s : s + block] for s in starts])[:n]
            rep = _lagged_products_mean(resampled, n_lags)
            reps[b] = np.abs(rep / raw[0].real)
        stderr = reps.std(axis=0, ddof=1)
        stderr[0] = 0.0  # lag 0 is pinned by self-normalization
    lags = dt * np.arange(n_lags + 1)
    return GammaCurve(lags=lags, gamma=gamma, stderr=stderr)


def estimate_cross_coherence(
    env_a: SampledEnvelope,
    env_b: SampledEnvelope,
    n_boot: int = 100,
    block_time: float | None = None,
    seed: int = 0,
):
    """Equal-time coherence gamma_12 = <E_a E_b*>/sqrt(I_a I_b) with stderr."""
    start = max(env_a.valid_from, env_b.valid_from)
    a = env_a.samples[start:]
    b = env_b.samples[start:]
    n = min(a.size, b.size)
    a, b = a[:n], b[:n]
    prod = a * np.conj(b)
    norm = math.sqrt(float(np.mean(np.abs(a) ** 2)) * float(np.mean(np.abs(b) ** 2)))
    gamma12 = complex(np.mean(prod) / norm)
    dt = env_a.grid.dt
    if block_time is None:
        block_time = n * dt / 50
    block = int(np.clip(round(block_time / dt), 1, n // 4))
    rng = trial_rng(seed)
    n_blocks = int(math.ceil(n / block))
    reps = np.empty(n_boot)
    for i in range(n_boot):
        starts = rng.integers(0, n - block + 1, size=n_blocks)
        pick = np.concatenate([prod[s : s + block] for s in starts])[:n]
        reps[i] = abs(np.mean(pick)) / norm
    return gamma12, float(reps.std(ddof=1))


def integrated_coherence_time(model_or_curve) -> float:
    """Diagnostic integral 2*Re Int_0^inf gamma(tau) dtau (order of Tc).

    Exposed as a derived quantity only; nothing in the package asserts its
    sign for empirical curves.
    """
    if isinstance(model_or_curve, CoherenceModel):
        if model_or_curve.kind == "gaussian":
            return math.sqrt(math.pi) * model_or_curve.Tc
        return 2.0 * model_or_curve.Tc
    curve = model_or_curve
    return float(2.0 * trapezoid(curve.gamma.real, curve.lags))
