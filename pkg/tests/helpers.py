"""Independent oracles used by the tests.

These deliberately avoid the package's own computational paths: expectation
values are taken in a truncated Fock space by explicit matrix algebra, and
overlap integrals are evaluated with adaptive quadrature on the analytic
kernel shapes.
"""

import math

import numpy as np
from scipy.integrate import quad


def fock_single_photon_covariance(theta, phi1, phi2, n_max=2):
    """<X_i X_j> for (|1,0> + e^{i theta}|0,1>)/sqrt2 plus two vacuum modes.

    Mode order (1, 2, 1v, 2v); quadratures measured at the LO phases they
    enter detection with: X1(phi1), X2(phi2), X1v(phi2), X2v(phi1).
    Brute force in a Fock space truncated at n_max photons per mode.
    """
    dim = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    eye = np.eye(dim)

    def embed(op, mode):
        mats = [eye] * 4
        mats[mode] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    ann = [embed(a, k) for k in range(4)]
    phases = [phi1, phi2, phi2, phi1]
    xs = [
        ann[k] * np.exp(-1j * phases[k]) + ann[k].conj().T * np.exp(1j * phases[k])
        for k in range(4)
    ]

    def basis(ns):
        idx = 0
        for n in ns:
            idx = idx * dim + n
        v = np.zeros(dim**4, dtype=complex)
        v[idx] = 1.0
        return v

    psi = (basis((1, 0, 0, 0)) + np.exp(1j * theta) * basis((0, 1, 0, 0))) / math.sqrt(2)
    cov = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            sym = 0.5 * (xs[i] @ xs[j] + xs[j] @ xs[i])
            cov[i, j] = np.real(psi.conj() @ (sym @ psi))
    return cov


def kernel_fn(kind, width):
    """Analytic causal kernel shape as a plain callable."""
    if kind == "box":
        return lambda t: (1.0 / width) if 0 <= t < width else 0.0
    if kind == "exponential":
        return lambda t: math.exp(-t / width) / width if t >= 0 else 0.0
    raise ValueError(kind)


def overlap_quad(kind, width, lag):
    """Int k(t) k(t + lag) dt by adaptive quadrature of the analytic kernel."""
    k = kernel_fn(kind, width)
    x = abs(lag)
    hi = width if kind == "box" else 60.0 * width
    if x >= hi:
        return 0.0
    val, _ = quad(lambda t: k(t) * k(t + x), 0.0, hi, epsabs=1e-16, epsrel=1e-12, limit=400)
    return val


def spectral_visibility_timedomain(T_R, Tc, delta):
    """Kernel-x-coherence overlap ratio by nested adaptive quadrature.

    Time-domain evaluation of Int dt dtb k(t) k(t + tb + delta) gamma(tb) for
    the one-pole kernel and the exponential-decay coherence, normalized by
    its delta = 0 value.
    """

    def inner(u):
        def f(tb):
            return math.exp(-(u + tb) / T_R) / T_R * math.exp(-abs(tb) / Tc)

        lo = -u
        hi = 60.0 * max(Tc, T_R)
        splits = sorted(p for p in (0.0,) if lo < p < hi)
        edges = [lo] + splits + [hi]
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            val, _ = quad(f, a, b, epsabs=1e-16, epsrel=1e-12, limit=400)
            total += val
        return total

    def outer(d):
        hi = 60.0 * T_R

        def f(t):
            return math.exp(-t / T_R) / T_R * inner(t + d)

        splits = sorted(p for p in (-d,) if 0 < p < hi)
        edges = [0.0] + splits + [hi]
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            val, _ = quad(f, a, b, epsabs=1e-16, epsrel=1e-10, limit=400)
            total += val
        return total

    return outer(delta) / outer(0.0)
