"""Shared domain types: prediction records, scored predictions, calibration
artifacts and split reports.

Everything here is an immutable value object; instances can be shared freely
across threads. Validation happens once, at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence


class ScorerKind(Enum):
    """Identity of a confidence scoring function.

    WDF works for any number of classes; KRT needs at least three logits
    (see :mod:`logitconf.confidence`).
    """

    WDF = "wdf"
    KRT = "krt"

    def __str__(self) -> str:
        return self.value


def _as_int(value, field: str) -> int:
    try:
        return int(value.__index__())
    except AttributeError:
        raise TypeError(f"{field} must be an integer, got {type(value).__name__!r}") from None


def predicted_class(logits: Sequence[float]) -> int:
    """Index of the largest logit; ties go to the lowest index."""
    return max(range(len(logits)), key=logits.__getitem__)


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    """One classified object: an opaque id, its logit vector and an optional
    gold label (a class index).

    Logits are arbitrary finite reals; they are not assumed to be
    probabilities or to sum to one.
    """

    id: str
    logits: tuple[float, ...]
    label: int | None = None

    def __post_init__(self):
        if not isinstance(self.id, str):
            raise TypeError(f"record id must be a string, got {type(self.id).__name__!r}")
        logits = tuple(float(v) for v in self.logits)
        if len(logits) < 2:
            raise ValueError(f"record {self.id!r}: need at least 2 logits, got {len(logits)}")
        if not all(math.isfinite(v) for v in logits):
            raise ValueError(f"record {self.id!r}: logits must all be finite")
        object.__setattr__(self, "logits", logits)
        if self.label is not None:
            label = _as_int(self.label, "label")
            if not 0 <= label < len(logits):
                raise ValueError(
                    f"record {self.id!r}: label {label} out of range for {len(logits)} classes"
                )
            object.__setattr__(self, "label", label)

    @property
    def num_classes(self) -> int:
        return len(self.logits)

    @property
    def predicted_class(self) -> int:
        return predicted_class(self.logits)


@dataclass(frozen=True, slots=True)
class ScoredPrediction:
    """A record together with its winner class and a confidence value.

    ``predicted_class`` always equals the argmax of the record's logits
    (lowest index on ties); ``confidence`` is non-negative, and additionally
    within [0, 1] for the WDF scorer.
    """

    record: PredictionRecord
    predicted_class: int
    confidence: float
    scorer: ScorerKind

    def __post_init__(self):
        object.__setattr__(self, "confidence", float(self.confidence))
        expected = self.record.predicted_class
        if self.predicted_class != expected:
            raise ValueError(
                f"record {self.record.id!r}: predicted_class {self.predicted_class} "
                f"does not match argmax of logits ({expected})"
            )
        if not math.isfinite(self.confidence) or self.confidence < 0:
            raise ValueError(
                f"record {self.record.id!r}: confidence must be finite and >= 0, "
                f"got {self.confidence}"
            )
        if self.scorer is ScorerKind.WDF and self.confidence > 1:
            raise ValueError(
                f"record {self.record.id!r}: WDF confidence must be in [0, 1], "
                f"got {self.confidence}"
            )

    @property
    def is_correct(self) -> bool | None:
        """True/False when the record is labeled, None otherwise."""
        if self.record.label is None:
            return None
        return self.predicted_class == self.record.label


#: Threshold sentinel meaning "accept every prediction into the exploit".
ACCEPT_ALL = float("-inf")
#: Threshold sentinel meaning "reject every prediction" (degenerate calibration).
REJECT_ALL = float("inf")


@dataclass(frozen=True, slots=True)
class CalibrationArtifact:
    """Persisted outcome of threshold calibration for one (scorer, confidence
    level) pair on a labeled test set.

    ``threshold_mu`` may be the ``ACCEPT_ALL``/``REJECT_ALL`` sentinel; a
    ``REJECT_ALL`` threshold marks the calibration as degenerate (no threshold
    could satisfy the requested level).
    """

    scorer: ScorerKind
    confidence_level_q: float
    baseline_accuracy_p: float
    threshold_mu: float
    error_budget_e_mu: int
    total_errors_e: int
    testset_size_n: int
    num_classes_r: int

    def __post_init__(self):
        if not isinstance(self.scorer, ScorerKind):
            raise TypeError("scorer must be a ScorerKind")
        q = float(self.confidence_level_q)
        p = float(self.baseline_accuracy_p)
        if not 0 < q <= 1:
            raise ValueError(f"confidence_level_q must be in (0, 1], got {q}")
        if not 0 <= p <= 1:
            raise ValueError(f"baseline_accuracy_p must be in [0, 1], got {p}")
        e_mu = _as_int(self.error_budget_e_mu, "error_budget_e_mu")
        e = _as_int(self.total_errors_e, "total_errors_e")
        n = _as_int(self.testset_size_n, "testset_size_n")
        r = _as_int(self.num_classes_r, "num_classes_r")
        if e_mu < 0 or e < 0:
            raise ValueError("error counts must be non-negative")
        if e_mu > e:
            raise ValueError(f"error budget {e_mu} exceeds total errors {e}")
        if n < 1:
            raise ValueError("testset_size_n must be positive")
        if e > n:
            raise ValueError(f"total errors {e} exceed test set size {n}")
        if r < 2:
            raise ValueError("num_classes_r must be at least 2")
        thr = float(self.threshold_mu)
        if math.isnan(thr):
            raise ValueError("threshold_mu must not be NaN")
        if q <= p and thr != ACCEPT_ALL:
            raise ValueError(
                "confidence level at or below baseline accuracy requires the "
                "accept-all threshold"
            )
        object.__setattr__(self, "confidence_level_q", q)
        object.__setattr__(self, "baseline_accuracy_p", p)
        object.__setattr__(self, "threshold_mu", thr)
        object.__setattr__(self, "error_budget_e_mu", e_mu)
        object.__setattr__(self, "total_errors_e", e)
        object.__setattr__(self, "testset_size_n", n)
        object.__setattr__(self, "num_classes_r", r)

    @property
    def degenerate(self) -> bool:
        """True when no admissible threshold existed (reject-all sentinel)."""
        return self.threshold_mu == REJECT_ALL

    @property
    def accept_all(self) -> bool:
        return self.threshold_mu == ACCEPT_ALL


@dataclass(frozen=True, slots=True)
class SplitReport:
    """Quantitative summary of one exploit/waste partition.

    The four label-dependent fields (``exploit_errors``, ``exploit_successes``,
    ``enhanced_accuracy``, ``baseline_accuracy``) are None when the split was
    computed over unlabeled predictions. ``enhanced_accuracy`` is also None
    for an empty exploit (undefined, deliberately not 0 or 1).
    """

    exploit_count: int
    waste_count: int
    exploit_ratio: float
    exploit_errors: int | None = None
    exploit_successes: int | None = None
    enhanced_accuracy: float | None = None
    baseline_accuracy: float | None = None

    def __post_init__(self):
        if self.exploit_count < 0 or self.waste_count < 0:
            raise ValueError("counts must be non-negative")
        if not 0 <= self.exploit_ratio <= 1:
            raise ValueError(f"exploit_ratio must be in [0, 1], got {self.exploit_ratio}")

    @property
    def total(self) -> int:
        return self.exploit_count + self.waste_count
