"""Post-detection current processing and fringe/visibility extraction."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import TraceTooShortError
from .fields import SampleGrid, trial_rng
from .homodyne import PhotocurrentTrace


def box_average(trace: PhotocurrentTrace, T: float) -> PhotocurrentTrace:
    """Sliding mean over a window T (equivalent to a 1/T box response kernel).

    Implemented by cumulative sums, independently of the FFT convolution path,
    so the two routes can cross-check each other.
    """
    dt = trace.grid.dt
    if T < dt * (1 - 1e-12):
        raise ValueError(f"window T={T:g}s must be at least one sample ({dt:g}s)")
    w = max(1, int(round(T / dt)))
    if w * dt >= trace.valid_duration:
        raise TraceTooShortError(
            f"window {T:g}s exceeds the valid duration {trace.valid_duration:g}s"
        )
    if w == 1:
        return trace
    x = trace.samples
    c = np.concatenate(([0.0], np.cumsum(x)))
    out = np.empty_like(x)
    out[w - 1 :] = (c[w:] - c[:-w]) / w
    out[: w - 1] = x[: w - 1]  # never valid, kept only to preserve length
    prov = dict(trace.provenance)
    prov["correlation_time"] = prov.get("correlation_time", 0.0) + w * dt
    prov.setdefault("chain", []).append(("box_average", w * dt))
    return PhotocurrentTrace(
        out,
        trace.grid,
        valid_from=min(trace.valid_from + w - 1, trace.grid.n - 1),
        provenance=prov,
    )


def delay_add(trace: PhotocurrentTrace, delta_T_e: float) -> PhotocurrentTrace:
    """Electronic delay-add i_plus(t) = i(t) + i(t + dTe), dTe snapped to grid."""
    d = trace.grid.index_of(delta_T_e)
    if d < 0:
        raise ValueError("electronic delay must be nonnegative")
    if d * trace.grid.dt >= trace.valid_duration / 2:
        raise TraceTooShortError(
            f"delay {delta_T_e:g}s exceeds half the valid duration {trace.valid_duration:g}s"
        )
    n = trace.grid.n - d
    out = trace.samples[:n] + trace.samples[d:]
    prov = dict(trace.provenance)
    prov.setdefault("chain", []).append(("delay_add", d * trace.grid.dt))
    grid = SampleGrid(trace.grid.dt, n, trace.grid.t0)
    return PhotocurrentTrace(out, grid, valid_from=trace.valid_from, provenance=prov)


@dataclass
class PowerEstimate:
    """Time-averaged <i^2> with a block-bootstrap standard error."""

    value: float
    stderr: float
    n_samples: int = 0


def mean_square_power(
    trace: PhotocurrentTrace,
    T_av: float | None = None,
    n_boot: int = 60,
    seed: int = 0,
) -> PowerEstimate:
    """<i^2> over (up to T_av of) the valid region, with bootstrap stderr.

    A warning is issued when the averaging span is below 100 correlation
    times of the trace (per its provenance), since the estimate is then
    dominated by a handful of independent fluctuations.
    """
    v = trace.valid()
    dt = trace.grid.dt
    if T_av is not None:
        m = int(round(T_av / dt))
        if m > v.size:
            raise TraceTooShortError(
                f"T_av={T_av:g}s exceeds the valid duration {v.size * dt:g}s"
            )
        v = v[:m]
    corr = trace.provenance.get("correlation_time", 0.0)
    if corr > 0 and v.size * dt < 100.0 * corr:
        warnings.warn(
            f"averaging span {v.size * dt:g}s is below 100 correlation times ({corr:g}s)",
            stacklevel=2,
        )
    sq = v**2
    value = float(sq.mean())
    block = int(np.clip(round(10.0 * corr / dt), 1, max(1, v.size // 4)))
    n_blocks = sq.size // block
    if n_blocks < 2 or n_boot <= 0:
        stderr = float(sq.std(ddof=1) / math.sqrt(max(sq.size, 2))) if sq.size > 1 else 0.0
        return PowerEstimate(value, stderr, v.size)
    block_means = sq[: n_blocks * block].reshape(n_blocks, block).mean(axis=1)
    rng = trial_rng(seed)
    idx = rng.integers(0, n_blocks, size=(n_boot, n_blocks))
    reps = block_means[idx].mean(axis=1)
    return PowerEstimate(value, float(reps.std(ddof=1)), v.size)


@dataclass
class FringeScan:
    """<i^2> (or power) versus scanned phase, with per-point standard errors."""

    phase: np.ndarray
    power: np.ndarray
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phase = np.asarray(self.phase, dtype=float)
        self.power = np.asarray(self.power, dtype=float)
        if self.phase.shape != self.power.shape:
            raise ValueError("phase and power must have equal length")
        if np.any(self.power < 0):
            raise ValueError("power must be nonnegative")
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
            if self.stderr.shape != self.phase.shape:
                raise ValueError("stderr length must match phase")


@dataclass
class VisibilityEstimate:
    """Fit of power(theta) = baseline * (1 + V cos(theta + phi0))."""

    V: float
    phi0: float
    baseline: float
    residual_rms: float
    ci95: float
    v_minmax: float = 0.0

    def agrees_with(self, v_oracle: float, floor: float = 0.05) -> bool:
        return abs(self.V - v_oracle) <= max(floor, 3.0 * self.ci95)


def extract_visibility(scan: FringeScan) -> VisibilityEstimate:
    """Weighted least-squares fringe fit; V is clipped at zero.

    Requires at least 8 phase points spanning 1.5 fringe periods.  The raw
    (max-min)/(max+min) contrast is reported alongside, but the fit is the
    authoritative estimate.
    """
    theta = scan.phase
    p = scan.power
    if theta.size < 8:
        raise ValueError(f"need at least 8 phase points, got {theta.size}")
    if np.ptp(theta) < 1.5 * 2.0 * math.pi * (1 - 1e-9):
        raise ValueError("phase scan must span at least 1.5 fringe periods")
    if scan.stderr is not None and np.any(scan.stderr > 0):
        # floor the errors so points pinned at zero power cannot take infinite weight
        sigma = np.maximum(scan.stderr, 1e-3 * scan.stderr.max())
        weights = 1.0 / sigma**2
        have_sigma = True
    else:
        weights = np.ones_like(p)
        have_sigma = False
    a = np.column_stack([np.ones_like(theta), np.cos(theta), np.sin(theta)])
    aw = a * weights[:, None]
    ata = a.T @ aw
    beta = np.linalg.solve(ata, aw.T @ p)
    resid = p - a @ beta
    chi2 = float(np.sum(weights * resid**2))
    dof = max(theta.size - 3, 1)
    cov = np.linalg.inv(ata)
    cov *= max(chi2 / dof, 1.0) if have_sigma else chi2 / dof
    b, c, s = beta
    r = math.hypot(c, s)
    residual_rms = float(np.sqrt(np.mean(resid**2)))
    total = p.max() + p.min()
    v_minmax = float((p.max() - p.min()) / total) if total > 0 else 0.0
    if b <= 0:
        return VisibilityEstimate(0.0, 0.0, float(b), residual_rms, math.inf, v_minmax)
    v = r / b
    phi0 = math.atan2(-s, c)
    if r > 1e-12 * b:
        grad = np.array([-r / b**2, c / (r * b), s / (r * b)])
    else:
        grad = np.array([0.0, 1.0 / b, 1.0 / b]) / math.sqrt(2.0)
    var_v = float(grad @ cov @ grad)
    ci95 = 1.96 * math.sqrt(max(var_v, 0.0))
    return VisibilityEstimate(max(v, 0.0), phi0, float(b), residual_rms, ci95, v_minmax)
