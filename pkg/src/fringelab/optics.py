"""Linear-optics transforms on sampled envelopes.

Ideal 50:50 splitters only; delays snap to integer sample counts (all
scenarios of interest have delays far above dt, and snapping avoids
interpolation artifacts in second-order statistics).  The carrier phase
omega0*DeltaT is folded into the scanned phase, so fringes are always
reported against scanned phase, never against an absolute carrier phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TraceTooShortError
from .fields import SampledEnvelope

SQRT2 = np.sqrt(2.0)


@dataclass
class PolarizedPair:
    """Two envelopes in orthogonal polarizations on one shared grid."""

    ex: SampledEnvelope
    ey: SampledEnvelope

    def __post_init__(self):
        if self.ex.grid != self.ey.grid:
            raise ValueError("pair components must share one grid")
        if (self.ex.pol, self.ey.pol) != ("x", "y"):
            raise ValueError(f"expected pol labels (x, y), got ({self.ex.pol}, {self.ey.pol})")

    @property
    def grid(self):
        return self.ex.grid

    @property
    def valid_from(self) -> int:
        return max(self.ex.valid_from, self.ey.valid_from)


@dataclass(frozen=True)
class MzConfig:
    """Mach-Zehnder path imbalance delta_T and scanned phase theta."""

    delta_T: float
    theta: float = 0.0
    split: str = "50:50"

    def __post_init__(self):
        if self.delta_T < 0:
            raise ValueError("delta_T must be nonnegative")
        if self.split != "50:50":
            raise ValueError("only 50:50 splitters are supported")


def polarization_split(env: SampledEnvelope, theta: float) -> PolarizedPair:
    """Split a scalar field into x and e^{i theta} y halves (classical, deterministic).

    Vacuum-port noise belongs to detection, not to this transform, so
    |ex|^2 + |ey|^2 = |E|^2 holds pointwise.
    """
    if env.pol != "scalar":
        raise ValueError(f"can only split a scalar-polarized field, got pol={env.pol!r}")
    ex = env.with_samples(env.samples / SQRT2, pol="x")
    ey = env.with_samples(np.exp(1j * theta) * env.samples / SQRT2, pol="y")
    return PolarizedPair(ex=ex, ey=ey)


def unbalanced_mz(env: SampledEnvelope, cfg: MzConfig) -> SampledEnvelope:
    """Mach-Zehnder output [E(t) + e^{i theta} E(t - dT)]/2.

    The first dT of the output is marked invalid; the rounding of dT to the
    grid is recorded in the output metadata.
    """
    d = env.grid.index_of(cfg.delta_T)
    if cfg.delta_T >= env.grid.duration / 2:
        raise TraceTooShortError(
            f"delay {cfg.delta_T:g}s exceeds half the trace duration {env.grid.duration:g}s"
        )
    delayed = np.roll(env.samples, d)
    out = (env.samples + np.exp(1j * cfg.theta) * delayed) / 2.0
    return env.with_samples(
        out,
        valid_from=env.valid_from + d,
        mz_delay_samples=d,
        mz_delay_rounding=d * env.grid.dt - cfg.delta_T,
        mz_theta=cfg.theta,
    )


def delay_and_rotate(env: SampledEnvelope, delta_T: float) -> PolarizedPair:
    """Keep the two arms separate: ex = E(t)/sqrt2, ey = E(t - dT)/sqrt2 (y-pol).

    The arms stay distinguishable in both time and polarization; recombining
    them is left to dual-LO detection.
    """
    d = env.grid.index_of(delta_T)
    if delta_T >= env.grid.duration / 2:
        raise TraceTooShortError(
            f"delay {delta_T:g}s exceeds half the trace duration {env.grid.duration:g}s"
        )
    ex = env.with_samples(env.samples / SQRT2, pol="x")
    ey = env.with_samples(
        np.roll(env.samples, d) / SQRT2,
        valid_from=env.valid_from + d,
        pol="y",
        arm_delay_samples=d,
    )
    return PolarizedPair(ex=ex, ey=ey)
