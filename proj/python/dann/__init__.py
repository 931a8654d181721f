"""Domain-adversarial neural networks with SVM, PAD and mSDA utilities."""

from ._core import (
    DataError,
    DimensionError,
    Mode,
    MsdaModel,
    Network,
    NumericalError,
    SvmModel,
    TrainConfig,
    TrainReport,
    TrainResult,
    default_c_grid,
    empirical_h_divergence,
    gen_moons,
    msda_fit,
    pad_from_error,
    proxy_a_distance,
    run_moons_pipeline,
    svm_train,
    train,
)

__all__ = [
    "DataError",
    "DimensionError",
    "Mode",
    "MsdaModel",
    "Network",
    "NumericalError",
    "SvmModel",
    "TrainConfig",
    "TrainReport",
    "TrainResult",
    "default_c_grid",
    "empirical_h_divergence",
    "gen_moons",
    "msda_fit",
    "pad_from_error",
    "proxy_a_distance",
    "run_moons_pipeline",
    "svm_train",
    "train",
]
