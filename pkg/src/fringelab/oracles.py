"""Closed-form visibility predictions used as ground truth for Monte-Carlo runs.

Every oracle works in ratios, so detector gain and LO power conventions drop
out.  Spectral-overlap integrals are evaluated with the trapezoidal rule on
their grid and re-checked at 10x resolution; a disagreement above 1e-4
relative raises OracleSelfCheckError, since these values serve as test ground
truth and must self-validate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import OracleSelfCheckError
from .fields import CoherenceModel, GammaCurve
from .homodyne import ResponseKernel


def visibility_pol(lam: float, gamma12: complex, I1: float, I2: float):
    """Dual-LO fringe visibility 2|g12| sqrt(lam I1 I2)/(I1 + lam I2).

    lam is the LO intensity ratio; returns (V, fringe phase = Arg g12).
    """
    if lam <= 0:
        raise ValueError("LO intensity ratio must be positive")
    if I1 < 0 or I2 < 0:
        raise ValueError("intensities must be nonnegative")
    g = complex(gamma12)
    if abs(g) > 1 + 1e-12:
        raise ValueError("|gamma12| must not exceed 1")
    denom = I1 + lam * I2
    if denom <= 0:
        return 0.0, 0.0
    v = 2.0 * abs(g) * math.sqrt(lam * I1 * I2) / denom
    return v, cmath.phase(g)


def box_visibility(T: float, delta_T: float) -> float:
    """Analytic box-kernel overlap visibility max(0, 1 - dT/T)."""
    if T <= 0:
        raise ValueError("box width must be positive")
    return max(0.0, 1.0 - abs(delta_T) / T)


def visibility_kernel_overlap(kernel: ResponseKernel, delta_T: float) -> float:
    """Normalized kernel self-overlap Int k(t)k(t+dT) dt / Int k^2 dt.

    Closed forms for box/exponential kinds; exact lag sums on the sampled
    kernel otherwise (a composite chain, say).
    """
    k0 = kernel.autocorrelation(0.0)
    return kernel.autocorrelation(delta_T) / k0


@dataclass
class SpectralPair:
    """Detector power response |k(w)|^2 and field spectrum S(w) on one grid."""

    omega: np.ndarray
    k_spectrum: np.ndarray
    field_spectrum: np.ndarray
    k_fn: object = None
    s_fn: object = None

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.k_spectrum = np.asarray(self.k_spectrum, dtype=float)
        self.field_spectrum = np.asarray(self.field_spectrum, dtype=float)
        if not (self.omega.shape == self.k_spectrum.shape == self.field_spectrum.shape):
            raise ValueError("spectra must share one frequency grid")
        if np.any(self.field_spectrum < 0):
            raise ValueError("field spectrum must be nonnegative")
        if np.any(self.k_spectrum < 0):
            raise ValueError("|k(w)|^2 must be nonnegative")
        if not np.all(np.isfinite(self.k_spectrum * self.field_spectrum)):
            raise ValueError("spectra must be finite")

    @classmethod
    def from_kernel_model(
        cls,
        kernel: ResponseKernel,
        model: CoherenceModel,
        n: int = 1 << 18,
        omega_span: float = 80.0,
    ) -> "SpectralPair":
        """Pair a detector kernel with a coherence model's baseband spectrum."""
        if kernel.kind == "box":
            T = kernel.width

            def k_fn(w):
                x = np.asarray(w) * T / 2.0
                return np.sinc(x / math.pi) ** 2

        elif kernel.kind == "exponential":
            tr = kernel.width

            def k_fn(w):
                return 1.0 / (1.0 + (np.asarray(w) * tr) ** 2)

        else:
            # sampled kernel: evaluate the DFT on a dense padded grid
            pad = 1 << int(max(kernel.samples.size * 4, n)).bit_length()
            spec = np.fft.rfft(kernel.samples, pad) * kernel.dt
            w_grid = 2.0 * math.pi * np.fft.rfftfreq(pad, kernel.dt)
            mag2 = np.abs(spec) ** 2
            norm = mag2[0] if mag2[0] > 0 else 1.0

            def k_fn(w):
                return np.interp(np.abs(np.asarray(w, dtype=float)), w_grid, mag2 / norm)

        wmax = omega_span * max(1.0 / model.Tc, 1.0 / kernel.width)
        omega = np.linspace(-wmax, wmax, n)
        return cls(omega, k_fn(omega), model.spectrum(omega), k_fn=k_fn, s_fn=model.spectrum)

    def _overlap(self, omega, kspec, sspec, delta: float) -> complex:
        integrand = kspec * sspec
        k2 = float(trapezoid(integrand, omega))
        if k2 <= 0:
            raise ValueError("K2 = Int |k|^2 S must be positive")
        num = trapezoid(integrand * np.exp(1j * omega * delta), omega)
        return complex(num / k2)

    def overlap(self, delta: float) -> complex:
        return self._overlap(self.omega, self.k_spectrum, self.field_spectrum, delta)

    def overlap_refined(self, delta: float, factor: int = 10) -> complex:
        """Same integral at `factor`x frequency resolution (cross-check path)."""
        fine = np.linspace(self.omega[0], self.omega[-1], factor * self.omega.size)
        if self.k_fn is not None and self.s_fn is not None:
            ks, ss = self.k_fn(fine), self.s_fn(fine)
        else:
            from scipy.interpolate import CubicSpline

            ks = np.clip(CubicSpline(self.omega, self.k_spectrum)(fine), 0.0, None)
            ss = np.clip(CubicSpline(self.omega, self.field_spectrum)(fine), 0.0, None)
        return self._overlap(fine, ks, ss, delta)


def visibility_spectral(sp: SpectralPair, delta: float, cross_check: bool = True):
    """Normalized spectral overlap V' e^{i theta0} at electronic mismatch delta.

    Returns (V', theta0).  With cross_check on, the value is recomputed at 10x
    frequency resolution and a relative disagreement above 1e-4 raises.
    """
    val = sp.overlap(delta)
    if cross_check:
        ref = sp.overlap_refined(delta)
        scale = max(abs(val), abs(ref), 1e-3)
        if abs(val - ref) > 1e-4 * scale:
            raise OracleSelfCheckError(
                f"spectral overlap self-check failed at delta={delta:g}: "
                f"{val:.8g} vs refined {ref:.8g}"
            )
    return abs(val), cmath.phase(val)


def general_visibility(kernel: ResponseKernel, model: CoherenceModel, delta: float) -> float:
    """|Int K(u) gamma(u - delta) du| normalized by its delta=0 value.

    K is the kernel self-overlap function.  This is the all-regime fringe
    visibility of homodyne detection behind a two-path imbalance: it reduces
    to the kernel-overlap law for slow detectors and to |gamma(delta)| for
    fast ones.
    """
    sp = SpectralPair.from_kernel_model(kernel, model)
    v, _ = visibility_spectral(sp, delta)
    return v


def visibility_delay_add(source, delta: float, regime: str) -> float:
    """Delay-add fringe visibility: 0.5|gamma(delta)| (fast) or 0.5 V(delta) (slow).

    The caller selects the detector regime; `source` is a coherence model or
    empirical gamma curve for 'fast', a response kernel for 'slow'.
    """
    if regime == "fast":
        if isinstance(source, CoherenceModel):
            return 0.5 * float(abs(source.gamma(delta)))
        if isinstance(source, GammaCurve):
            return 0.5 * source.abs_at(delta)
        raise TypeError("fast regime needs a CoherenceModel or GammaCurve")
    if regime == "slow":
        if not isinstance(source, ResponseKernel):
            raise TypeError("slow regime needs a ResponseKernel")
        return 0.5 * visibility_kernel_overlap(source, delta)
    raise ValueError(f"unknown regime {regime!r}")


def visibility_qcw(
    kernel: ResponseKernel,
    Tp: float,
    correlation: np.ndarray | None,
    delta: float,
    regime: str,
    delay_add: bool = False,
) -> float:
    """Quasi-cw pulse-train visibility in the short/long coherence regimes.

    Short regime (independent pulse amplitudes): kernel overlap at `delta`
    (= n Tp for direct homodyne, n Tp - dTe after delay-add), halved when
    delay_add.  Long regime (correlated amplitudes I_q, delay-add implied):
    0.5 |sum_q I_q K(delta - q Tp)| / sum_q I_q K(q Tp), which tends to
    0.5 |I_m / I_0| with m = [delta/Tp] once the kernel stops straddling
    neighboring pulses.
    """
    if Tp <= 0:
        raise ValueError("Tp must be positive")
    if regime == "short":
        if correlation is not None:
            iq = np.asarray(correlation)
            m = iq.size // 2
            off = np.delete(iq, m)
            if off.size and np.max(np.abs(off)) > 1e-12 * abs(iq[m]):
                raise ValueError("short regime requires independent pulses (I_q = I0 delta_q0)")
        v = visibility_kernel_overlap(kernel, delta)
        return 0.5 * v if delay_add else v
    if regime == "long":
        if correlation is None:
            raise ValueError("long regime requires a correlation array I_q")
        iq = np.asarray(correlation, dtype=complex)
        m = iq.size // 2
        qs = np.arange(-m, m + 1)
        num = sum(iq[m + q] * kernel.autocorrelation(delta - q * Tp) for q in qs)
        den = sum(iq[m + q] * kernel.autocorrelation(q * Tp) for q in qs)
        den = complex(den).real
        if den <= 0:
            raise ValueError("baseline kernel-correlation sum must be positive")
        return 0.5 * abs(num) / den
    raise ValueError(f"unknown regime {regime!r}")


def visibility_single_photon(
    e1: float, e2: float, kernel: ResponseKernel, delta_T: float
) -> float:
    """Split-single-photon visibility 2 e1 e2 K(dT) / (3 (e1^2+e2^2) K(0)).

    Caps at 1/3 for equal LO amplitudes and a kernel too slow to resolve the
    two pulses; vanishes when the kernel overlap at dT does.
    """
    if e1 < 0 or e2 < 0:
        raise ValueError("LO amplitudes must be nonnegative")
    if e1 == 0 and e2 == 0:
        raise ValueError("at least one LO amplitude must be positive")
    ratio = kernel.autocorrelation(delta_T) / kernel.autocorrelation(0.0)
    return 2.0 * e1 * e2 * ratio / (3.0 * (e1**2 + e2**2))


def visibility_quantum(n_photons: float, gamma_mod: float = 1.0, loss: float = 1.0) -> float:
    """Vacuum-noise-limited visibility |gamma| N/(N+2), photons per mode N.

    `loss` rescales N to C*N, the fit form used against lossy measurements.
    """
    if n_photons < 0:
        raise ValueError("photon number must be nonnegative")
    if not 0 <= gamma_mod <= 1 + 1e-12:
        raise ValueError("|gamma| must lie in [0, 1]")
    if loss <= 0:
        raise ValueError("loss factor must be positive")
    n_eff = loss * n_photons
    return gamma_mod * n_eff / (n_eff + 2.0)
