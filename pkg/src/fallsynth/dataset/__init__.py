"""Sequence data model, attribute vocabularies, storage, augmentation, and
the procedural trial generator."""
from .attributes import (
    AttributeConfig,
    FALL_QUALITIES,
    GLITCH_QUALITIES,
    IMPACT_LOCATIONS,
    IMPACT_QUALITIES,
    NUM_FALL_CLASSES,
    NUM_GLITCH_CLASSES,
    NUM_IMPACT_CLASSES,
    UnknownLabel,
    VOCABULARIES,
    display_name,
)
from .augment import (
    InvalidJitterRange,
    SequenceTooShort,
    augment_fft,
    augment_yaw,
    fft_jitter,
    normalize_origin,
    project_rotations,
)
from .io import (
    MANIFEST_NAME,
    ParseError,
    SCHEMA_VERSION,
    SchemaVersionMismatch,
    load_dataset,
    load_manifest,
    load_sequence,
    save_sequence,
    sequence_from_dict,
    sequence_to_dict,
    split_names,
    write_manifest,
)
from .sequence import EmptySequence, InvalidSequence, MotionSequence, PHASES
from .synthetic import (
    grid_attributes,
    DEFAULT_DURATIONS,
    DurationTooShort,
    FALL_QUALITY_PARAMS,
    GLITCH_QUALITY_PARAMS,
    IMPACT_LOCATION_JOINTS,
    IMPACT_QUALITY_PARAMS,
    synthesize_dataset,
    synthesize_fall,
)

__all__ = [
    "AttributeConfig",
    "FALL_QUALITIES",
    "GLITCH_QUALITIES",
    "IMPACT_LOCATIONS",
    "IMPACT_QUALITIES",
    "NUM_FALL_CLASSES",
    "NUM_GLITCH_CLASSES",
    "NUM_IMPACT_CLASSES",
    "UnknownLabel",
    "VOCABULARIES",
    "display_name",
    "InvalidJitterRange",
    "SequenceTooShort",
    "augment_fft",
    "augment_yaw",
    "fft_jitter",
    "normalize_origin",
    "project_rotations",
    "MANIFEST_NAME",
    "ParseError",
    "SCHEMA_VERSION",
    "SchemaVersionMismatch",
    "load_dataset",
    "load_manifest",
    "load_sequence",
    "save_sequence",
    "sequence_from_dict",
    "sequence_to_dict",
    "split_names",
    "write_manifest",
    "EmptySequence",
    "InvalidSequence",
    "MotionSequence",
    "PHASES",
    "DEFAULT_DURATIONS",
    "DurationTooShort",
    "FALL_QUALITY_PARAMS",
    "GLITCH_QUALITY_PARAMS",
    "IMPACT_LOCATION_JOINTS",
    "IMPACT_QUALITY_PARAMS",
    "grid_attributes",
    "synthesize_dataset",
    "synthesize_fall",
]
