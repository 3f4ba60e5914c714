"""Medical-report document QA toolkit.

Thin Python surface over the C++ core: OCR layout restoration, annotation
quality checks, QA bank generation and scoring.
"""

from ._core import (
    ABSTAIN_TOKEN,
    ToolkitError,
    canonicalize,
    classify_quality,
    default_synonym_schema,
    edge_angle_degrees,
    generate_bank,
    measure_fidelity,
    recompute_flag,
    restore_document,
    rouge_l,
    score,
    soft_accuracy,
    synth_generate,
    validate_annotation_json,
)

__all__ = [
    "ABSTAIN_TOKEN",
    "ToolkitError",
    "canonicalize",
    "classify_quality",
    "default_synonym_schema",
    "edge_angle_degrees",
    "generate_bank",
    "measure_fidelity",
    "recompute_flag",
    "restore_document",
    "rouge_l",
    "score",
    "soft_accuracy",
    "synth_generate",
    "validate_annotation_json",
]

__version__ = "0.1.0"
