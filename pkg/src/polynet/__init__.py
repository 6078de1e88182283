"""Polynomial networks for binary classification of spectral features.

Layered and incremental network growth with a projection-based neuron
fitting rule, EEG band-power feature extraction, evaluation metrics, and
seeded synthetic data with planted ground-truth networks.
"""

from .data import DataError, FeatureTable, read_feature_csv, split_indices, write_feature_csv
from .features import (
    BAND_PRESETS,
    BandSpec,
    FeatureError,
    NormStats,
    SegmentSpec,
    band_power,
    extract_band_features,
    normalize_apply,
    normalize_fit,
    segment,
)
from .fitting import (
    DesignPair,
    FitParams,
    FitTrace,
    FittingError,
    exterior_criterion,
    expand_design,
    expand_row,
    fit_least_squares,
    fit_projection,
)
from .growth import (
    GrowthError,
    GrowthParams,
    GrowthTrace,
    default_F,
    grow,
    grow_incremental,
    grow_layered,
)
from .metrics import (
    Confusion,
    MetricError,
    RunStats,
    confusion,
    performance,
    repeated_runs,
    sensitivity,
    specificity,
)
from .model import (
    InputRef,
    NetworkError,
    Neuron,
    PolyNetwork,
    Weights4,
    classify,
    classify_batch,
    eval_network,
    eval_network_batch,
    eval_transfer,
)
from .modelio import ModelParseError, parse_model, render_model
from .synth import (
    NoiseSpec,
    SynthError,
    SynthResult,
    SynthSpec,
    alzheimer_model,
    gen_dataset,
    planted_paper_models,
    recovery_model,
    sleep_model,
    standard_neuron_task,
)

__version__ = "0.1.0"

__all__ = [
    "BAND_PRESETS",
    "BandSpec",
    "Confusion",
    "DataError",
    "DesignPair",
    "FeatureError",
    "FeatureTable",
    "FitParams",
    "FitTrace",
    "FittingError",
    "GrowthError",
    "GrowthParams",
    "GrowthTrace",
    "InputRef",
    "MetricError",
    "ModelParseError",
    "NetworkError",
    "Neuron",
    "NoiseSpec",
    "NormStats",
    "PolyNetwork",
    "RunStats",
    "SegmentSpec",
    "SynthError",
    "SynthResult",
    "SynthSpec",
    "Weights4",
    "alzheimer_model",
    "band_power",
    "classify",
    "classify_batch",
    "confusion",
    "default_F",
    "eval_network",
    "eval_network_batch",
    "eval_transfer",
    "expand_design",
    "expand_row",
    "exterior_criterion",
    "extract_band_features",
    "fit_least_squares",
    "fit_projection",
    "gen_dataset",
    "grow",
    "grow_incremental",
    "grow_layered",
    "normalize_apply",
    "normalize_fit",
    "parse_model",
    "performance",
    "planted_paper_models",
    "read_feature_csv",
    "recovery_model",
    "render_model",
    "repeated_runs",
    "segment",
    "sensitivity",
    "sleep_model",
    "specificity",
    "split_indices",
    "standard_neuron_task",
    "write_feature_csv",
]
