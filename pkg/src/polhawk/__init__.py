"""Driven-dissipative polariton fluids in one dimension.

Mean-field steady states of the lossy Gross-Pitaevskii equation under
coherent driving, their Bogoliubov excitation spectra on top of the
optical bistability loop, and vacuum-seeded density-density correlation
maps from truncated-Wigner Monte Carlo, with trans-sonic flow profiles
(black-hole-horizon analogues) as the main use case.

Internal units: length um, time ps, rates and frequencies angular 1/ps.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .bistability import (
    ConstraintViolation,
    InvalidDetuning,
    SonicPoint,
    TurningPoints,
    density_response,
    drive_for_density,
    effective_detuning,
    response_table,
    sonic_point,
    turning_points,
    validate_waterfall_config,
    waterfall_checks,
)
from .configio import (
    ConfigError,
    dumps_config,
    load_config,
    loads_config,
    save_config,
)
from .core import (
    HBAR_MEV_PS,
    AbsorbingMask,
    CavityParams,
    Grid,
    PotentialProfile,
    PumpProfile,
    PumpSegment,
    mev_to_angfreq,
)
from .correlations import (
    BandSpec,
    BandStat,
    CorrelationAccumulator,
    CorrelationMap,
    GridMismatch,
    InsufficientSamples,
    QuadrantStatistics,
    g1,
    g2_map,
    normal_order_G2,
    quadrant_statistics,
    wigner_density,
)
from .dispersion import (
    BranchParams,
    EmptyBand,
    ModeRoot,
    ModeSet,
    RootResidualTooLarge,
    instability_window,
    local_modes,
    omega_lab,
    omega_sonic,
    scattering_band,
)
from .engine import SplitStepEngine
from .formats import (
    FlowRecord,
    FormatError,
    read_cmap1,
    read_flow1,
    write_cmap1,
    write_flow1,
)
from .meanfield import (
    Horizon,
    MeanFieldSolution,
    NotConverged,
    find_horizons,
    flow_velocity,
    make_engine,
    relax_to_steady,
)
from .scenarios import SCENARIO_NAMES, UnknownScenario, load_scenario
from .twa import (
    EnsembleReport,
    NoiseStream,
    NonFinite,
    TwaConfig,
    load_checkpoint,
    noise_amplitude,
    prepare_mean_field,
    run_ensemble,
)

__all__ = [
    "BACKEND",
    "HBAR_MEV_PS",
    "AbsorbingMask",
    "BandSpec",
    "BandStat",
    "BranchParams",
    "CavityParams",
    "ConfigError",
    "ConstraintViolation",
    "CorrelationAccumulator",
    "CorrelationMap",
    "EmptyBand",
    "EnsembleReport",
    "FlowRecord",
    "FormatError",
    "Grid",
    "GridMismatch",
    "Horizon",
    "InsufficientSamples",
    "InvalidDetuning",
    "MeanFieldSolution",
    "ModeRoot",
    "ModeSet",
    "NoiseStream",
    "NonFinite",
    "NotConverged",
    "PotentialProfile",
    "PumpProfile",
    "PumpSegment",
    "QuadrantStatistics",
    "RootResidualTooLarge",
    "SCENARIO_NAMES",
    "SonicPoint",
    "SplitStepEngine",
    "TurningPoints",
    "TwaConfig",
    "UnknownScenario",
    "density_response",
    "drive_for_density",
    "dumps_config",
    "effective_detuning",
    "find_horizons",
    "flow_velocity",
    "g1",
    "g2_map",
    "instability_window",
    "load_checkpoint",
    "load_config",
    "load_scenario",
    "loads_config",
    "local_modes",
    "make_engine",
    "mev_to_angfreq",
    "noise_amplitude",
    "normal_order_G2",
    "omega_lab",
    "omega_sonic",
    "prepare_mean_field",
    "quadrant_statistics",
    "read_cmap1",
    "read_flow1",
    "relax_to_steady",
    "response_table",
    "run_ensemble",
    "save_config",
    "scattering_band",
    "sonic_point",
    "turning_points",
    "validate_waterfall_config",
    "waterfall_checks",
    "wigner_density",
    "write_cmap1",
    "write_flow1",
]
