"""Recognizer training, embeddings, and the distribution metrics."""
from .evaluation import (
    DEFAULT_NUM_PAIRS,
    DegenerateCovariance,
    EmbeddingSet,
    EmptyInput,
    TooFewEmbeddings,
    config_hash,
    diversity,
    evaluation_report,
    fid,
    recognition_accuracy,
)
from .recognizer import (
    FallRecognizer,
    HEAD_CLASSES,
    HEADS,
    InsufficientData,
    RecognizerConfig,
    class_targets,
    cross_entropy,
    graph_partitions,
    load_recognizer,
    save_recognizer,
    sequence_features,
    train_recognizer,
)

__all__ = [
    "DEFAULT_NUM_PAIRS",
    "DegenerateCovariance",
    "EmbeddingSet",
    "EmptyInput",
    "TooFewEmbeddings",
    "config_hash",
    "diversity",
    "evaluation_report",
    "fid",
    "recognition_accuracy",
    "FallRecognizer",
    "HEAD_CLASSES",
    "HEADS",
    "InsufficientData",
    "RecognizerConfig",
    "class_targets",
    "cross_entropy",
    "graph_partitions",
    "load_recognizer",
    "save_recognizer",
    "sequence_features",
    "train_recognizer",
]
