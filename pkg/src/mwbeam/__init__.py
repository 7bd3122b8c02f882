"""Confocal microwave imaging with coarse-to-fine focal-point decimation."""

from .beamform import (
    EVAL_COUNTER,
    BeamformerKind,
    EnergyMap,
    aligned_channel,
    das_energy,
    das_energy_monostatic,
    dmas_energy,
    image,
)
from .coarse2fine import (
    Automatic,
    CheckVerdict,
    FrameworkConfig,
    FrameworkReport,
    Manual,
    MetricTrace,
    auto_decimation_factor,
    breast_mask,
    class_distances,
    consistency_check,
    decision_metric,
    run_framework,
    select_roi,
)
from .geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    ImagingGrid,
    Region,
    delay_monostatic,
    delay_multistatic,
    ring_array,
)
from .simulate import (
    BackscatterDataset,
    Phantom,
    Pulse,
    gaussian_modulated_pulse,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "Automatic",
    "BackscatterDataset",
    "BeamformerKind",
    "CheckVerdict",
    "EVAL_COUNTER",
    "EnergyMap",
    "FrameworkConfig",
    "FrameworkReport",
    "ImagingGrid",
    "Manual",
    "MetricTrace",
    "Phantom",
    "Pulse",
    "Region",
    "SPEED_OF_LIGHT",
    "aligned_channel",
    "auto_decimation_factor",
    "breast_mask",
    "class_distances",
    "consistency_check",
    "das_energy",
    "das_energy_monostatic",
    "decision_metric",
    "delay_monostatic",
    "delay_multistatic",
    "dmas_energy",
    "gaussian_modulated_pulse",
    "image",
    "ring_array",
    "run_framework",
    "select_roi",
    "simulate",
]
