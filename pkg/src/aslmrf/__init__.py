"""CRLB-optimized scan design, fingerprint simulation and neural-network
estimation for arterial spin labeling MR fingerprinting.

Submodules
----------
model      two-compartment signal model and fingerprint simulator
schedules  labeling-schedule construction (interpolated, random, linear)
crlb       Fisher information, design cost and the exhaustive schedule search
dsp        Butterworth high-pass preconditioning
regressor  per-parameter MLP regressors trained on synthetic fingerprints
phantom    procedural digital phantom generation and truth-vs-estimate scoring
multipld   multi-PLD ASL baseline with the two-stage least-squares fit
fileio     schedule CSV, weight JSON, raster map and volume file formats
cli        command-line pipeline (design / train / estimate / phantom / ...)
"""

from .model import (
    Fingerprint,
    HemodynamicParams,
    ModelConstants,
    PulseType,
    ScanFrame,
    ScanSchedule,
    add_noise,
    arterial_magnetization,
    normalize_first_frame,
    simulate_fingerprint,
)
from .schedules import (
    ControlPoints,
    DurationGrid,
    assemble_schedule,
    interpolate_durations,
    make_suboptimal_1,
    make_suboptimal_2,
    random_label_order,
    scale_to_total,
)
from .crlb import (
    DesignWeights,
    ParameterSpace,
    design_cost,
    fisher_matrix,
    numerical_jacobian,
    optimize_label_order,
    optimize_labeling,
    predicted_normalized_std,
    sample_theta_set,
)
from .dsp import IIRFilter, apply_zero_phase, design_butterworth_highpass

__all__ = [
    "Fingerprint", "HemodynamicParams", "ModelConstants", "PulseType",
    "ScanFrame", "ScanSchedule", "add_noise", "arterial_magnetization",
    "normalize_first_frame", "simulate_fingerprint",
    "ControlPoints", "DurationGrid", "assemble_schedule",
    "interpolate_durations", "make_suboptimal_1", "make_suboptimal_2",
    "random_label_order", "scale_to_total",
    "DesignWeights", "ParameterSpace", "design_cost", "fisher_matrix",
    "numerical_jacobian", "optimize_label_order", "optimize_labeling",
    "predicted_normalized_std", "sample_theta_set",
    "IIRFilter", "apply_zero_phase", "design_butterworth_highpass",
]

__version__ = "0.1.0"
