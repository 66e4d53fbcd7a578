"""Flat-file formats: binary envelope/trace dumps, CSV exports, JSON records.

Binary layout: a fixed 64-byte header (magic, version, flags, dt, n, omega0,
t0, padding) followed by float64 payload -- interleaved (re, im) pairs for
complex envelopes, plain float64 for real photocurrents (flag bit 0 set).
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .fields import SampleGrid, SampledEnvelope
from .homodyne import PhotocurrentTrace

MAGIC = b"FRNGLAB1"
VERSION = 1
FLAG_REAL = 0x1
_HEADER = struct.Struct("<8sII d q d d 16x")  # 64 bytes total
assert _HEADER.size == 64


def _write_header(fh, flags: int, dt: float, n: int, omega0: float, t0: float):
    fh.write(_HEADER.pack(MAGIC, VERSION, flags, dt, n, omega0, t0))


def _read_header(fh):
    magic, version, flags, dt, n, omega0, t0 = _HEADER.unpack(fh.read(_HEADER.size))
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}, not a fringelab dump")
    if version != VERSION:
        raise ValueError(f"unsupported dump version {version}")
    return flags, dt, n, omega0, t0


def write_envelope(path, env: SampledEnvelope):
    with open(path, "wb") as fh:
        _write_header(fh, 0, env.grid.dt, env.grid.n, env.omega0, env.grid.t0)
        inter = np.empty(2 * env.grid.n)
        inter[0::2] = env.samples.real
        inter[1::2] = env.samples.imag
        fh.write(inter.astype("<f8").tobytes())


def read_envelope(path) -> SampledEnvelope:
    with open(path, "rb") as fh:
        flags, dt, n, omega0, t0 = _read_header(fh)
        if flags & FLAG_REAL:
            raise ValueError("file holds a real trace, not a complex envelope")
        inter = np.frombuffer(fh.read(16 * n), dtype="<f8")
    samples = inter[0::2] + 1j * inter[1::2]
    return SampledEnvelope(samples, SampleGrid(dt, n, t0), omega0=omega0)


def write_trace(path, trace: PhotocurrentTrace):
    with open(path, "wb") as fh:
        _write_header(fh, FLAG_REAL, trace.grid.dt, trace.grid.n, 0.0, trace.grid.t0)
        fh.write(trace.samples.astype("<f8").tobytes())


def read_trace(path) -> PhotocurrentTrace:
    with open(path, "rb") as fh:
        flags, dt, n, _, t0 = _read_header(fh)
        if not flags & FLAG_REAL:
            raise ValueError("file holds a complex envelope, not a real trace")
        samples = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
    return PhotocurrentTrace(samples, SampleGrid(dt, n, t0))


def write_envelope_csv(path, env: SampledEnvelope):
    t = env.grid.times()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for ti, s in zip(t, env.samples):
            w.writerow([repr(ti), repr(s.real), repr(s.imag)])


def write_trace_csv(path, trace: PhotocurrentTrace):
    t = trace.grid.times()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "i"])
        for ti, s in zip(t, trace.samples):
            w.writerow([repr(ti), repr(s)])


def write_scan_csv(path, scan):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phase", "power", "stderr"])
        err = scan.stderr if scan.stderr is not None else np.zeros_like(scan.phase)
        for row in zip(scan.phase, scan.power, err):
            w.writerow([repr(v) for v in row])


def write_result_json(path, record: dict):
    Path(path).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def visibility_record(est, scenario: str = "", oracle: float | None = None, **extra) -> dict:
    """JSON-ready record of one fringe fit, with an oracle tag when available."""
    record = {
        "V": est.V,
        "phi0": est.phi0,
        "baseline": est.baseline,
        "ci95": est.ci95,
        "residual_rms": est.residual_rms,
        "v_minmax": est.v_minmax,
        "scenario": scenario,
    }
    if oracle is not None:
        record["oracle"] = oracle
    record.update(extra)
    return record


def write_two_column(path, x, y, header: str = ""):
    """Plot-ready two-column whitespace table."""
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for xi, yi in zip(x, y):
            fh.write(f"{xi!r} {yi!r}\n")
