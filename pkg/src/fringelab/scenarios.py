"""Configuration-driven experiment runner.

A ScenarioConfig names one of six scenarios and carries every knob needed to
run it: field model, optics arrangement, LO settings, detector kernel, noise,
post-detection processing chain, phase-scan spec and ensemble sizing.  The
runner executes synthesis -> optics -> detection -> processing -> fringe scan
-> visibility fit, attaches the matching closed-form oracle, and is fully
deterministic for a fixed master seed (trial streams are derived by spawn
keys, so results are independent of scheduling).
"""

from __future__ import annotations

import copy
import math
import re
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field, fields as dc_fields

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .errors import ConfigError
from .fields import (
    CoherenceModel,
    PulseTrainSpec,
    SampleGrid,
    make_phase_diffusion_envelope,
    make_pulse_train,
    make_thermal_envelope,
    pulse_train_profile,
    triangular_correlation,
)
from .homodyne import (
    LocalOscillator,
    NoiseModel,
    ResponseKernel,
    direct_intensity_current,
    dual_lo_current,
    homodyne_current,
    quantum_cw_current,
    single_photon_moments,
)
from .optics import MzConfig, delay_and_rotate, polarization_split, unbalanced_mz
from .oracles import (
    general_visibility,
    visibility_kernel_overlap,
    visibility_pol,
    visibility_qcw,
    visibility_quantum,
    visibility_single_photon,
)
from .signal_proc import (
    FringeScan,
    box_average,
    delay_add,
    extract_visibility,
    mean_square_power,
)

SCENARIOS = (
    "orthogonal_pol_cw",
    "unbalanced_cw",
    "pulsed_dual_lo",
    "quasi_cw",
    "single_photon",
    "quantum_cw",
)

_UNITS = {
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "µs": 1e-6,
    "ns": 1e-9,
    "ps": 1e-12,
    "hz": 1.0,
    "khz": 1e3,
    "mhz": 1e6,
    "ghz": 1e9,
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*([a-zA-Zµ]*)\s*$")


def parse_quantity(value) -> float:
    """Number, or string with a time/frequency unit suffix ('63 ns', '500MHz')."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _QUANTITY_RE.match(value)
        if m:
            num, unit = m.groups()
            if not unit:
                return float(num)
            scale = _UNITS.get(unit.lower())
            if scale is not None:
                return float(num) * scale
    raise ConfigError(f"cannot parse quantity {value!r}")


@dataclass
class GridConfig:
    dt: float = 1e-10
    duration: float = 1e-6


@dataclass
class FieldConfig:
    kind: str = "lorentzian"  # lorentzian | gaussian | phase-diffusion | pulse-train
    Tc: float = 2e-9
    I0: float = 1.0
    pulse_shape: str = "gaussian"
    pulse_width: float = 0.0
    Tp: float = 0.0
    n_pulses: int = 0
    correlation: str = "independent"  # independent | triangular
    correlation_span: int = 0  # M for triangular I_q


@dataclass
class OpticsConfig:
    arrangement: str = "none"  # none | pol_split | mz | delay_rotate
    delta_T: float = 0.0
    block_arm: str = "none"  # none | y


@dataclass
class LoConfig:
    amplitude_x: float = 1.0
    amplitude_y: float = 1.0
    phase_x: float = 0.0
    phase_y: float = 0.0


@dataclass
class KernelConfig:
    kind: str = "box"  # box | exponential
    width: float = 1e-8


@dataclass
class NoiseConfig:
    mode: str = "off"
    bandwidth: float = 0.0


@dataclass
class ProcessingStep:
    op: str  # box_average | delay_add
    value: float


@dataclass
class ScanConfig:
    points: int = 12
    start: float = 0.0
    stop: float = 3.0 * math.pi


@dataclass
class EnsembleConfig:
    trials: int = 4
    seed: int = 0


@dataclass
class QuantumConfig:
    photons_per_mode: float = 1.0
    gamma_abs: float = 1.0
    loss: float = 1.0


@dataclass
class ScenarioConfig:
    scenario: str
    detection: str = "homodyne"  # homodyne | direct
    grid: GridConfig = dc_field(default_factory=GridConfig)
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    optics: OpticsConfig = dc_field(default_factory=OpticsConfig)
    lo: LoConfig = dc_field(default_factory=LoConfig)
    kernel: KernelConfig = dc_field(default_factory=KernelConfig)
    noise: NoiseConfig = dc_field(default_factory=NoiseConfig)
    processing: list = dc_field(default_factory=list)
    scan: ScanConfig = dc_field(default_factory=ScanConfig)
    ensemble: EnsembleConfig = dc_field(default_factory=EnsembleConfig)
    quantum: QuantumConfig = dc_field(default_factory=QuantumConfig)


_TIME_FIELDS = {
    ("grid", "dt"),
    ("grid", "duration"),
    ("field", "Tc"),
    ("field", "pulse_width"),
    ("field", "Tp"),
    ("optics", "delta_T"),
    ("kernel", "width"),
}


def _build_section(cls, data: dict, section: str, quantity_fields=()):
    known = {f.name: f for f in dc_fields(cls)}
    kwargs = {}
    for key, raw in data.items():
        if key not in known:
            raise ConfigError(f"unknown key {section}.{key}")
        if key in quantity_fields or (section, key) in _TIME_FIELDS or key == "bandwidth":
            kwargs[key] = parse_quantity(raw)
        else:
            kwargs[key] = raw
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad section [{section}]: {exc}") from exc


def parse_config(data: dict) -> ScenarioConfig:
    """Build and validate a ScenarioConfig from a nested key/value mapping."""
    data = dict(data)
    scenario = data.pop("scenario", None)
    if scenario is None:
        raise ConfigError("missing required key: scenario")
    detection = data.pop("detection", "homodyne")
    sections = {
        "grid": GridConfig,
        "field": FieldConfig,
        "optics": OpticsConfig,
        "lo": LoConfig,
        "kernel": KernelConfig,
        "noise": NoiseConfig,
        "scan": ScanConfig,
        "ensemble": EnsembleConfig,
        "quantum": QuantumConfig,
    }
    kwargs = {}
    processing_raw = data.pop("processing", [])
    for name, payload in data.items():
        cls = sections.pop(name, None)
        if cls is None:
            raise ConfigError(f"unknown section [{name}]")
        if not isinstance(payload, dict):
            raise ConfigError(f"section [{name}] must be a table")
        kwargs[name] = _build_section(cls, payload, name)
    steps = []
    for i, step in enumerate(processing_raw):
        if not isinstance(step, dict) or set(step) - {"op", "value"}:
            raise ConfigError(f"processing[{i}] must have keys op, value")
        if step.get("op") not in ("box_average", "delay_add"):
            raise ConfigError(f"processing[{i}].op must be box_average or delay_add")
        steps.append(ProcessingStep(step["op"], parse_quantity(step["value"])))
    cfg = ScenarioConfig(scenario=scenario, detection=detection, processing=steps, **kwargs)
    validate_config(cfg)
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, "rb") as fh:
        return parse_config(tomllib.load(fh))


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return asdict(cfg)


def validate_config(cfg: ScenarioConfig):
    """Field-level validation; raises ConfigError with a path to the offender."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if cfg.detection not in ("homodyne", "direct"):
        raise ConfigError(f"detection must be homodyne or direct, got {cfg.detection!r}")
    if cfg.grid.dt <= 0 or cfg.grid.duration <= cfg.grid.dt:
        raise ConfigError("grid.dt must be positive and well below grid.duration")
    if cfg.scan.points < 8:
        raise ConfigError("scan.points must be at least 8")
    if cfg.scan.stop - cfg.scan.start < 1.5 * 2 * math.pi * (1 - 1e-9):
        raise ConfigError("scan range must span at least 1.5 fringe periods")
    if cfg.kernel.kind not in ("box", "exponential"):
        raise ConfigError(f"kernel.kind must be box or exponential, got {cfg.kernel.kind!r}")
    if cfg.kernel.width <= 0:
        raise ConfigError("kernel.width must be positive")
    if cfg.optics.delta_T < 0:
        raise ConfigError("optics.delta_T must be nonnegative")
    for name in ("delta_T",):
        val = getattr(cfg.optics, name)
        if val >= cfg.grid.duration / 2:
            raise ConfigError(f"optics.{name}={val:g}s does not fit on the grid")
    delay_adds = [s for s in cfg.processing if s.op == "delay_add"]
    if len(delay_adds) > 1:
        raise ConfigError("at most one delay_add step is supported")
    uses_pulses = cfg.scenario in ("pulsed_dual_lo", "quasi_cw")
    if uses_pulses:
        if cfg.field.kind != "pulse-train":
            raise ConfigError(f"{cfg.scenario} requires field.kind = 'pulse-train'")
        if cfg.field.pulse_width <= 0 or cfg.field.Tp <= 0 or cfg.field.n_pulses < 1:
            raise ConfigError("pulse-train fields need pulse_width, Tp and n_pulses")
        if cfg.field.correlation not in ("independent", "triangular"):
            raise ConfigError("field.correlation must be independent or triangular")
        if cfg.field.correlation == "triangular" and cfg.field.correlation_span < 1:
            raise ConfigError("triangular correlation needs correlation_span >= 1")
    elif cfg.scenario in ("orthogonal_pol_cw", "unbalanced_cw"):
        if cfg.field.kind not in ("lorentzian", "gaussian", "phase-diffusion"):
            raise ConfigError(f"{cfg.scenario} needs a cw field model, got {cfg.field.kind!r}")
        if cfg.field.Tc <= 0:
            raise ConfigError("field.Tc must be positive")
    if cfg.scenario == "quasi_cw" and cfg.field.Tp > 0:
        ratio = cfg.optics.delta_T / cfg.field.Tp
        if abs(ratio - round(ratio)) > 1e-6:
            raise ConfigError(
                "quasi_cw requires optics.delta_T to be a whole multiple of field.Tp"
            )
    if cfg.scenario in ("quantum_cw", "single_photon") and cfg.detection != "homodyne":
        raise ConfigError(f"{cfg.scenario} supports homodyne detection only")
    if cfg.scenario == "quantum_cw":
        if cfg.noise.mode != "vacuum" or cfg.noise.bandwidth <= 0:
            raise ConfigError("quantum_cw requires noise.mode='vacuum' with a bandwidth")
        if cfg.quantum.photons_per_mode < 0:
            raise ConfigError("quantum.photons_per_mode must be nonnegative")
        if not 0 <= cfg.quantum.gamma_abs <= 1:
            raise ConfigError("quantum.gamma_abs must lie in [0, 1]")
    if cfg.noise.mode == "vacuum" and cfg.noise.bandwidth > 1.0 / (2 * cfg.grid.dt):
        raise ConfigError("noise.bandwidth exceeds the grid Nyquist bandwidth")
    if cfg.ensemble.trials < 1 and cfg.scenario != "single_photon":
        raise ConfigError("ensemble.trials must be at least 1")


@dataclass
class ResultRow:
    param: float
    v_mc: float
    ci95: float
    v_oracle: float
    phi0: float
    baseline: float
    runtime_s: float


@dataclass
class ResultTable:
    rows: list
    config: dict
    version: str = __version__
    param_path: str = ""

    def agreement_ok(self, floor: float = 0.05) -> bool:
        return all(
            abs(r.v_mc - r.v_oracle) <= max(floor, 3.0 * r.ci95) for r in self.rows
        )

    def to_record(self) -> dict:
        return {
            "version": self.version,
            "param_path": self.param_path,
            "rows": [asdict(r) for r in self.rows],
            "config": self.config,
        }

    def write_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["param", "v_mc", "ci95", "v_oracle", "phi0", "baseline", "runtime_s"])
            for r in self.rows:
                w.writerow(
                    [repr(v) for v in (r.param, r.v_mc, r.ci95, r.v_oracle, r.phi0, r.baseline, r.runtime_s)]
                )


def _trial_seed(master: int, *path: int) -> int:
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _make_grid(cfg: ScenarioConfig) -> SampleGrid:
    n = int(round(cfg.grid.duration / cfg.grid.dt))
    return SampleGrid(cfg.grid.dt, max(n, 2))


def _make_kernel(cfg: ScenarioConfig) -> ResponseKernel:
    if cfg.kernel.kind == "box":
        return ResponseKernel.box(cfg.kernel.width, cfg.grid.dt)
    return ResponseKernel.exponential(cfg.kernel.width, cfg.grid.dt)


def _make_noise(cfg: ScenarioConfig) -> NoiseModel:
    return NoiseModel(cfg.noise.mode, cfg.noise.bandwidth)


def _coherence_model(cfg: ScenarioConfig) -> CoherenceModel:
    return CoherenceModel(cfg.field.kind, cfg.field.Tc, cfg.field.I0)


def _pulse_spec(cfg: ScenarioConfig) -> PulseTrainSpec:
    corr = None
    if cfg.field.correlation == "triangular":
        corr = triangular_correlation(cfg.field.I0, cfg.field.correlation_span)
    return PulseTrainSpec(
        shape=cfg.field.pulse_shape,
        width=cfg.field.pulse_width,
        Tp=cfg.field.Tp,
        n_pulses=cfg.field.n_pulses,
        mean_intensity=cfg.field.I0,
        correlation=corr,
    )


def _make_cw_envelope(cfg, grid, seed):
    model = _coherence_model(cfg)
    if model.kind == "phase-diffusion":
        return make_phase_diffusion_envelope(model, grid, seed)
    return make_thermal_envelope(model, grid, seed)


def _apply_chain(cfg: ScenarioConfig, trace):
    for step in cfg.processing:
        if step.op == "box_average":
            trace = box_average(trace, step.value)
        else:
            trace = delay_add(trace, step.value)
    return trace


def _trial_power(cfg: ScenarioConfig, theta: float, trial_seed: int):
    """One Monte-Carlo trial: fresh field, full chain, time-averaged power."""
    grid = _make_grid(cfg)
    kernel = _make_kernel(cfg)
    noise = _make_noise(cfg)
    scenario = cfg.scenario
    if scenario == "orthogonal_pol_cw":
        env = _make_cw_envelope(cfg, grid, trial_seed)
        pair = polarization_split(env, theta)
        if cfg.optics.block_arm == "y":
            pair.ey.samples[:] = 0.0
        lo_x = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x, "x")
        lo_y = LocalOscillator(cfg.lo.amplitude_y, cfg.lo.phase_y, "y")
        if cfg.detection == "direct":
            trace = direct_intensity_current(pair, kernel)
        else:
            trace = dual_lo_current(pair, lo_x, lo_y, kernel, noise, trial_seed)
    elif scenario == "unbalanced_cw":
        env = _make_cw_envelope(cfg, grid, trial_seed)
        out = unbalanced_mz(env, MzConfig(cfg.optics.delta_T, theta))
        if cfg.detection == "direct":
            trace = direct_intensity_current(out, kernel)
        else:
            lo = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x, "scalar")
            trace = homodyne_current(out, lo, kernel, noise, trial_seed)
    elif scenario == "pulsed_dual_lo":
        spec = _pulse_spec(cfg)
        env = make_pulse_train(spec, grid, trial_seed)
        pair = delay_and_rotate(env, cfg.optics.delta_T)
        if cfg.detection == "direct":
            trace = direct_intensity_current(pair, kernel)
        else:
            prof_x = pulse_train_profile(spec.shape, spec.width, spec.Tp, spec.n_pulses, grid)
            prof_y = pulse_train_profile(
                spec.shape, spec.width, spec.Tp, spec.n_pulses, grid, delay=cfg.optics.delta_T
            )
            lo_x = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x + theta, "x", prof_x)
            lo_y = LocalOscillator(cfg.lo.amplitude_y, cfg.lo.phase_y, "y", prof_y)
            trace = dual_lo_current(pair, lo_x, lo_y, kernel, noise, trial_seed)
    elif scenario == "quasi_cw":
        spec = _pulse_spec(cfg)
        env = make_pulse_train(spec, grid, trial_seed)
        out = unbalanced_mz(env, MzConfig(cfg.optics.delta_T, theta))
        if cfg.detection == "direct":
            trace = direct_intensity_current(out, kernel)
        else:
            prof = pulse_train_profile(spec.shape, spec.width, spec.Tp, spec.n_pulses, grid)
            lo = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x, "scalar", prof)
            trace = homodyne_current(out, lo, kernel, noise, trial_seed)
    elif scenario == "quantum_cw":
        lo_x = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x + theta, "x")
        lo_y = LocalOscillator(cfg.lo.amplitude_y, cfg.lo.phase_y, "y")
        rate = cfg.quantum.loss * cfg.quantum.photons_per_mode * cfg.noise.bandwidth
        trace = quantum_cw_current(
            rate, cfg.quantum.gamma_abs, lo_x, lo_y, kernel, noise, grid, trial_seed
        )
    else:
        raise ConfigError(f"scenario {scenario!r} has no Monte-Carlo trial path")
    trace = _apply_chain(cfg, trace)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # ensemble-level span check happens in run_scenario
        return mean_square_power(trace, n_boot=40, seed=_trial_seed(trial_seed, 99))


def _scan_phases(cfg: ScenarioConfig) -> np.ndarray:
    return np.linspace(cfg.scan.start, cfg.scan.stop, cfg.scan.points)


def _ensemble_span_check(cfg: ScenarioConfig):
    corr = cfg.field.Tc if cfg.field.kind != "pulse-train" else cfg.kernel.width
    corr = max(corr, cfg.kernel.width)
    span = cfg.ensemble.trials * cfg.grid.duration
    if span < 1e4 * corr:
        warnings.warn(
            f"each phase point averages only {span / corr:.0f} correlation times "
            "(recommended >= 1e4); expect noisy visibilities",
            stacklevel=3,
        )


def _trial_job(args):
    cfg, theta, seed = args
    est = _trial_power(cfg, theta, seed)
    return est.value, est.stderr


def run_scenario(
    cfg: ScenarioConfig, sweep_index: int = 0, param: float = 0.0, workers: int = 1
) -> ResultTable:
    """Execute one scenario end-to-end and return a single-row ResultTable.

    With workers > 1 the ensemble trials run on a process pool; the split-seed
    contract makes the table independent of how they are scheduled.
    """
    validate_config(cfg)
    t_start = time.perf_counter()
    phases = _scan_phases(cfg)
    if cfg.scenario == "single_photon":
        kernel = _make_kernel(cfg)
        lo_x = LocalOscillator(cfg.lo.amplitude_x, cfg.lo.phase_x, "x")
        lo_y = LocalOscillator(cfg.lo.amplitude_y, cfg.lo.phase_y, "y")
        power = np.array(
            [
                single_photon_moments(lo_x, lo_y, kernel, cfg.optics.delta_T, th).integrated_power()
                for th in phases
            ]
        )
        scan = FringeScan(phases, power, None, meta={"scenario": cfg.scenario, "exact": True})
    else:
        _ensemble_span_check(cfg)
        jobs = [
            (cfg, float(theta), _trial_seed(cfg.ensemble.seed, sweep_index, p_idx, t_idx))
            for p_idx, theta in enumerate(phases)
            for t_idx in range(cfg.ensemble.trials)
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_trial_job, jobs))
        else:
            results = [_trial_job(j) for j in jobs]
        vals = np.array([r[0] for r in results]).reshape(phases.size, cfg.ensemble.trials)
        variances = np.array([r[1] for r in results]).reshape(phases.size, cfg.ensemble.trials) ** 2
        power = vals.mean(axis=1)
        err = np.sqrt(variances.mean(axis=1) / cfg.ensemble.trials)
        scan = FringeScan(phases, power, err, meta={"scenario": cfg.scenario})
    vis = extract_visibility(scan)
    v_oracle = oracle_visibility(cfg)
    row = ResultRow(
        param=param,
        v_mc=vis.V,
        ci95=vis.ci95,
        v_oracle=v_oracle,
        phi0=vis.phi0,
        baseline=vis.baseline,
        runtime_s=time.perf_counter() - t_start,
    )
    table = ResultTable([row], config_to_dict(cfg))
    table.scan = scan
    table.visibility = vis
    return table


def _effective_kernel(cfg: ScenarioConfig) -> ResponseKernel:
    """Detector kernel composed with every box_average step in the chain."""
    kernel = _make_kernel(cfg)
    for step in cfg.processing:
        if step.op == "box_average":
            kernel = kernel.convolved_with(ResponseKernel.box(step.value, cfg.grid.dt))
    return kernel


def _delay_add_mismatch(cfg: ScenarioConfig):
    for step in cfg.processing:
        if step.op == "delay_add":
            return step.value - cfg.optics.delta_T
    return None


def oracle_visibility(cfg: ScenarioConfig) -> float:
    """Closed-form fringe visibility matching the scenario's configuration."""
    kernel = _effective_kernel(cfg)
    mismatch = _delay_add_mismatch(cfg)
    if cfg.scenario == "orthogonal_pol_cw":
        if cfg.detection == "direct" or cfg.optics.block_arm != "none":
            return 0.0
        lam = (cfg.lo.amplitude_y / cfg.lo.amplitude_x) ** 2
        half = cfg.field.I0 / 2.0
        return visibility_pol(lam, 1.0, half, half)[0]
    if cfg.scenario == "unbalanced_cw":
        model = _coherence_model(cfg)
        if cfg.detection == "direct":
            return float(abs(model.gamma(cfg.optics.delta_T)))
        if mismatch is not None:
            return 0.5 * general_visibility(kernel, model, mismatch)
        return general_visibility(kernel, model, cfg.optics.delta_T)
    if cfg.scenario == "pulsed_dual_lo":
        if cfg.detection == "direct":
            return 0.0  # non-overlapping pulse modes carry no intensity fringe
        lam = (cfg.lo.amplitude_x / cfg.lo.amplitude_y) ** 2
        balance = 2.0 * math.sqrt(lam) / (1.0 + lam)
        return balance * visibility_kernel_overlap(kernel, cfg.optics.delta_T)
    if cfg.scenario == "quasi_cw":
        spec = _pulse_spec(cfg)
        n = int(round(cfg.optics.delta_T / cfg.field.Tp))
        if cfg.detection == "direct":
            if spec.correlation is None:
                return 1.0 if n == 0 else 0.0
            m = spec.span
            return float(abs(spec.correlation[m + n] / spec.correlation[m])) if abs(n) <= m else 0.0
        if spec.correlation is None:
            if mismatch is not None:
                return visibility_qcw(kernel, cfg.field.Tp, None, mismatch, "short", delay_add=True)
            return visibility_qcw(kernel, cfg.field.Tp, None, cfg.optics.delta_T, "short")
        if mismatch is None:
            raise ConfigError("correlated quasi_cw homodyne needs a delay_add step")
        return visibility_qcw(kernel, cfg.field.Tp, spec.correlation, mismatch, "long")
    if cfg.scenario == "single_photon":
        return visibility_single_photon(
            cfg.lo.amplitude_x, cfg.lo.amplitude_y, kernel, cfg.optics.delta_T
        )
    if cfg.scenario == "quantum_cw":
        return visibility_quantum(
            cfg.quantum.photons_per_mode, cfg.quantum.gamma_abs, cfg.quantum.loss
        )
    raise ConfigError(f"no oracle for scenario {cfg.scenario!r}")


_PATH_RE = re.compile(r"^([A-Za-z_]\w*)(?:\[(\d+)\])?$")


def set_param(cfg: ScenarioConfig, param_path: str, value: float) -> ScenarioConfig:
    """Return a copy of cfg with the numeric field at a dotted path replaced."""
    out = copy.deepcopy(cfg)
    obj = out
    parts = param_path.split(".")
    for i, part in enumerate(parts):
        m = _PATH_RE.match(part)
        if not m:
            raise ConfigError(f"bad parameter path segment {part!r}")
        name, index = m.groups()
        if not hasattr(obj, name):
            raise ConfigError(f"unknown parameter path {param_path!r} (no field {name!r})")
        last = i == len(parts) - 1
        target = getattr(obj, name)
        if index is not None:
            target = target[int(index)]
        if last:
            if index is not None:
                raise ConfigError("parameter path must end on a scalar field")
            current = getattr(obj, name)
            if isinstance(current, bool) or not isinstance(current, (int, float)):
                raise ConfigError(f"parameter path {param_path!r} is not numeric")
            setattr(obj, name, type(current)(value) if isinstance(current, int) else float(value))
        else:
            obj = target
    validate_config(out)
    return out


def _sweep_point(args):
    cfg_dictless, param_path, idx, value = args
    cfg = set_param(cfg_dictless, param_path, value)
    table = run_scenario(cfg, sweep_index=idx, param=value)
    return table.rows[0]


def sweep(
    cfg: ScenarioConfig,
    param_path: str,
    values,
    workers: int = 1,
) -> ResultTable:
    """Run one scenario per value of the addressed parameter.

    All points share the master seed; per-point streams are split by sweep
    index, so the table is identical however the points are scheduled.
    """
    values = [float(v) for v in values]
    jobs = [(cfg, param_path, idx, v) for idx, v in enumerate(values)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return ResultTable(rows, config_to_dict(cfg), param_path=param_path)
