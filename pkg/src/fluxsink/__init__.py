"""Partial-wave scattering and absorption on magnetic flux lines.

Two singular attractive potentials around an Aharonov-Bohm flux line:
an inverse-square core (channels: closed forms per mode, plus an
independent radial-integration oracle) and an inverse-quartic core
(quartic: connection matrices between exact endpoint wave bases).  The
cli module drives scenario files, parameter sweeps, and the self-check
suite; scenario holds the config schema.
"""

from .channels import (
    PHI_MIN,
    ChannelSolution,
    CrossSectionReport,
    Custom,
    ElasticSubcritical,
    ElasticSupercritical,
    PartialMode,
    Regime,
    ScatteringConfig,
    Sink,
    TotalAbsorption,
    ab_amplitude_closed,
    amplitude,
    classify_mode,
    cross_sections,
    nonregular_modes,
    partial_current,
    physical_coefficients,
    solve_channel,
    tail_mode_bound,
)
from .errors import (
    ConfigError,
    DegenerateModeError,
    DegenerateOrderError,
    FitDegenerateError,
    FluxsinkError,
    ForwardDirectionError,
    IncompleteRangeError,
    ModelRegimeMismatch,
    PoleError,
    RangeError,
    StiffnessError,
    UnitarityViolation,
)
from .oracle import (
    AsymptoticCoefficients,
    RadialProfile,
    current_spread,
    default_rho_in,
    extract_smatrix,
    init_for_model,
    integrate_radial,
    match_large_rho,
    match_small_rho,
    oracle_smatrix,
    profile_current,
)
from .quartic import (
    ConnectionMatrix,
    ModeSchedule,
    QuarticConfig,
    backward_defect,
    capture_probability,
    connection_matrix,
    model_schedule,
    quartic_amplitude,
    quartic_smatrix,
    schedule_cross_section,
)
from .scenario import (
    ElasticAssignment,
    Scenario,
    load_scenario,
    resolve_m_range,
    write_scenario,
)
from .specfun import (
    Order,
    bessel_j,
    bessel_j_pair,
    complex_gamma,
    hankel,
    hankel_pair,
    wronskian_check,
)

__version__ = "0.1.0"

__all__ = [
    "PHI_MIN",
    "ChannelSolution",
    "CrossSectionReport",
    "Custom",
    "ElasticSubcritical",
    "ElasticSupercritical",
    "PartialMode",
    "Regime",
    "ScatteringConfig",
    "Sink",
    "TotalAbsorption",
    "ab_amplitude_closed",
    "amplitude",
    "classify_mode",
    "cross_sections",
    "nonregular_modes",
    "partial_current",
    "physical_coefficients",
    "solve_channel",
    "tail_mode_bound",
    "ConfigError",
    "DegenerateModeError",
    "DegenerateOrderError",
    "FitDegenerateError",
    "FluxsinkError",
    "ForwardDirectionError",
    "IncompleteRangeError",
    "ModelRegimeMismatch",
    "PoleError",
    "RangeError",
    "StiffnessError",
    "UnitarityViolation",
    "AsymptoticCoefficients",
    "RadialProfile",
    "current_spread",
    "default_rho_in",
    "extract_smatrix",
    "init_for_model",
    "integrate_radial",
    "match_large_rho",
    "match_small_rho",
    "oracle_smatrix",
    "profile_current",
    "ConnectionMatrix",
    "ModeSchedule",
    "QuarticConfig",
    "backward_defect",
    "capture_probability",
    "connection_matrix",
    "model_schedule",
    "quartic_amplitude",
    "quartic_smatrix",
    "schedule_cross_section",
    "ElasticAssignment",
    "Scenario",
    "load_scenario",
    "resolve_m_range",
    "write_scenario",
    "Order",
    "bessel_j",
    "bessel_j_pair",
    "complex_gamma",
    "hankel",
    "hankel_pair",
    "wronskian_check",
    "__version__",
]
