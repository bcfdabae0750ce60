"""logitconf: per-prediction confidence from raw classifier logits, threshold
calibration for a requested confidence level, and exploit/waste filtering of
prediction streams."""

from .calibration import (
    FractionStability,
    LabeledScoredSet,
    StabilityReport,
    calibrate,
    error_budget,
    find_threshold,
    relative_error_in_exploit,
    stability_experiment,
)
from .confidence import (
    KRT_MIN_CLASSES,
    min_classes,
    score_batch,
    score_krt,
    score_record,
    score_wdf,
    score_wdf_raw,
)
from .core import (
    ACCEPT_ALL,
    REJECT_ALL,
    CalibrationArtifact,
    PredictionRecord,
    ScoredPrediction,
    ScorerKind,
    SplitReport,
    predicted_class,
)
from .metrics import (
    CurveRow,
    SplitOutcome,
    confidence_curve,
    enhanced_accuracy,
    exploit_ratio,
    macro_f1,
    split,
)
from .synth import generate_records

__version__ = "0.1.0"

__all__ = [
    "ACCEPT_ALL",
    "REJECT_ALL",
    "KRT_MIN_CLASSES",
    "CalibrationArtifact",
    "CurveRow",
    "FractionStability",
    "LabeledScoredSet",
    "PredictionRecord",
    "ScoredPrediction",
    "ScorerKind",
    "SplitOutcome",
    "SplitReport",
    "StabilityReport",
    "calibrate",
    "confidence_curve",
    "enhanced_accuracy",
    "error_budget",
    "exploit_ratio",
    "find_threshold",
    "generate_records",
    "macro_f1",
    "min_classes",
    "predicted_class",
    "relative_error_in_exploit",
    "score_batch",
    "score_krt",
    "score_record",
    "score_wdf",
    "score_wdf_raw",
    "split",
    "stability_experiment",
]
