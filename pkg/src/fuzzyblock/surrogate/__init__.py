"""Indirect method: dataset generation from the kernel plus TSK surrogate."""
from .dataset import (
    CSV_HEADER,
    FEATURE_NAMES,
    DatasetSpec,
    NormalizationRecord,
    Sample,
    generate_dataset,
    normalize,
    read_dataset_csv,
    single_joint_case,
    write_dataset_csv,
)
from .model import (
    TrainingError,
    TskModel,
    damage_map,
    extract_rules,
    forward,
    forward_batch,
    firing_strengths,
    init_model,
    load_model,
    lse_consequents,
    premise_gradients,
    rmse,
    save_model,
    train,
)

__all__ = [
    "CSV_HEADER",
    "DatasetSpec",
    "FEATURE_NAMES",
    "NormalizationRecord",
    "Sample",
    "TrainingError",
    "TskModel",
    "damage_map",
    "extract_rules",
    "firing_strengths",
    "forward",
    "forward_batch",
    "generate_dataset",
    "init_model",
    "load_model",
    "lse_consequents",
    "normalize",
    "premise_gradients",
    "read_dataset_csv",
    "rmse",
    "save_model",
    "single_joint_case",
    "train",
    "write_dataset_csv",
]
