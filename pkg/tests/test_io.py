"""Flat-file round trips for the dump formats."""

import json

import numpy as np
import pytest

from fringelab import PhotocurrentTrace, SampleGrid, SampledEnvelope, trial_rng
from fringelab import io as flio
from fringelab.signal_proc import FringeScan


def test_envelope_binary_roundtrip(tmp_path):
    grid = SampleGrid(0.5e-9, 1000, t0=1e-9)
    rng = trial_rng(1)
    samples = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    env = SampledEnvelope(samples, grid, omega0=1.2e15)
    path = tmp_path / "env.bin"
    flio.write_envelope(path, env)
    assert path.stat().st_size == 64 + 16 * 1000
    back = flio.read_envelope(path)
    np.testing.assert_array_equal(back.samples, env.samples)
    assert back.grid == grid
    assert back.omega0 == pytest.approx(1.2e15)


def test_trace_binary_roundtrip(tmp_path):
    grid = SampleGrid(1e-9, 500)
    tr = PhotocurrentTrace(trial_rng(2).standard_normal(500), grid)
    path = tmp_path / "trace.bin"
    flio.write_trace(path, tr)
    assert path.stat().st_size == 64 + 8 * 500
    back = flio.read_trace(path)
    np.testing.assert_array_equal(back.samples, tr.samples)


def test_payload_flag_mismatch_rejected(tmp_path):
    grid = SampleGrid(1e-9, 16)
    tr = PhotocurrentTrace(np.zeros(16), grid)
    path = tmp_path / "trace.bin"
    flio.write_trace(path, tr)
    with pytest.raises(ValueError):
        flio.read_envelope(path)
    env = SampledEnvelope(np.zeros(16, complex), grid)
    path2 = tmp_path / "env.bin"
    flio.write_envelope(path2, env)
    with pytest.raises(ValueError):
        flio.read_trace(path2)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"\x00" * 128)
    with pytest.raises(ValueError):
        flio.read_envelope(path)


def test_csv_exports(tmp_path):
    grid = SampleGrid(1e-9, 8)
    env = SampledEnvelope(np.arange(8) * (1 + 1j), grid)
    flio.write_envelope_csv(tmp_path / "env.csv", env)
    lines = (tmp_path / "env.csv").read_text().strip().splitlines()
    assert lines[0] == "t,re,im"
    assert len(lines) == 9

    tr = PhotocurrentTrace(np.arange(8.0), grid)
    flio.write_trace_csv(tmp_path / "tr.csv", tr)
    assert (tmp_path / "tr.csv").read_text().startswith("t,i")

    scan = FringeScan(np.array([0.0, 1.0] * 6), np.ones(12), np.full(12, 0.1))
    flio.write_scan_csv(tmp_path / "scan.csv", scan)
    rows = (tmp_path / "scan.csv").read_text().strip().splitlines()
    assert rows[0] == "phase,power,stderr"
    assert len(rows) == 13


def test_json_and_two_column(tmp_path):
    flio.write_result_json(tmp_path / "r.json", {"a": 1, "nested": {"b": [1, 2]}})
    assert json.loads((tmp_path / "r.json").read_text()) == {"a": 1, "nested": {"b": [1, 2]}}
    flio.write_two_column(tmp_path / "c.dat", [1.0, 2.0], [3.0, 4.0], header="x y")
    text = (tmp_path / "c.dat").read_text().splitlines()
    assert text[0] == "# x y"
    assert len(text) == 3
