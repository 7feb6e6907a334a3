"""Uncertainty features for machine-translation quality estimation."""

from ._uqkit import (  # noqa: F401
    CorpusIndex,
    DataError,
    FusionModel,
    NoiseConfig,
    QERecord,
    SyntheticBackend,
    SyntheticConfig,
    TripleStat,
    UsageError,
    extract_features,
    feature_names,
    levenshtein,
    load_model,
    pearson,
    read_records,
    sim,
    tokenize,
    train,
    triple_stat,
    write_records,
)

__all__ = [
    "CorpusIndex",
    "DataError",
    "FusionModel",
    "NoiseConfig",
    "QERecord",
    "SyntheticBackend",
    "SyntheticConfig",
    "TripleStat",
    "UsageError",
    "extract_features",
    "feature_names",
    "levenshtein",
    "load_model",
    "pearson",
    "read_records",
    "sim",
    "tokenize",
    "train",
    "triple_stat",
    "write_records",
]
