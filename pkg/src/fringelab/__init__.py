"""fringelab: Monte-Carlo simulation and analytic oracles for amplitude-based
optical interference recovered through balanced homodyne detection."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    CorrelationNotPSDError,
    FringelabError,
    GridTooCoarseError,
    OracleSelfCheckError,
    PolarizationMismatchError,
    ProfileMismatchError,
    PulseOverlapError,
    TraceTooShortError,
)
from .fields import (
    CoherenceModel,
    GammaCurve,
    PulseTrainSpec,
    SampleGrid,
    SampledEnvelope,
    estimate_autocorrelation,
    estimate_cross_coherence,
    integrated_coherence_time,
    make_phase_diffusion_envelope,
    make_pulse_train,
    make_thermal_envelope,
    pulse_train_profile,
    trial_rng,
    triangular_correlation,
)
from .homodyne import (
    LocalOscillator,
    NoiseModel,
    PhotocurrentTrace,
    ResponseKernel,
    SecondMomentModel,
    direct_intensity_current,
    dual_lo_current,
    homodyne_current,
    quantum_cw_current,
    single_photon_moments,
)
from .optics import (
    MzConfig,
    PolarizedPair,
    delay_and_rotate,
    polarization_split,
    unbalanced_mz,
)
from .oracles import (
    SpectralPair,
    box_visibility,
    general_visibility,
    visibility_delay_add,
    visibility_kernel_overlap,
    visibility_pol,
    visibility_qcw,
    visibility_quantum,
    visibility_single_photon,
    visibility_spectral,
)
from .scenarios import (
    ResultRow,
    ResultTable,
    ScenarioConfig,
    load_config,
    oracle_visibility,
    parse_config,
    parse_quantity,
    run_scenario,
    set_param,
    sweep,
)
from .signal_proc import (
    FringeScan,
    PowerEstimate,
    VisibilityEstimate,
    box_average,
    delay_add,
    extract_visibility,
    mean_square_power,
)
