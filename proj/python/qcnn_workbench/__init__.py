"""Python bindings for the QCNN workbench."""

from ._core import (
    AnsatzSpec,
    FeatureRecord,
    ParseError,
    SchemaError,
    all_ansatzes,
    bce_loss,
    cnn_param_count,
    conv_unit_entropies,
    encode,
    gradient,
    layerwise_entropies,
    load_features,
    param_count,
    parse_ansatz,
    predict_prob,
    preprocess,
    run_cli,
    split,
    synthesize_gaussians,
    train,
    train_baseline,
    write_features,
)

__all__ = [
    "AnsatzSpec",
    "FeatureRecord",
    "ParseError",
    "SchemaError",
    "all_ansatzes",
    "bce_loss",
    "cnn_param_count",
    "conv_unit_entropies",
    "encode",
    "gradient",
    "layerwise_entropies",
    "load_features",
    "param_count",
    "parse_ansatz",
    "predict_prob",
    "preprocess",
    "run_cli",
    "split",
    "synthesize_gaussians",
    "train",
    "train_baseline",
    "write_features",
]
