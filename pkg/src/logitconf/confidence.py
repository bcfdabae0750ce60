"""Confidence scoring functions over logit vectors.

Two scorers are provided:

* ``score_wdf`` — winner-difference: the gap between the two largest logits,
  normalized by the magnitude of their sum and clamped into [0, 1]. Works
  for any number of classes, including binary.
* ``score_krt`` — the (plain, population) kurtosis of the logit vector. A
  peaked vector (one dominant winner over a flat tail) has high kurtosis.
  Undefined for binary problems: the kurtosis of any two distinct values is
  identically 1, so it carries no information and is rejected.

Both scorers map an undifferentiated vector (all logits equal) to 0: there
is no winner distinction, hence no confidence.
"""

from __future__ import annotations

import heapq
import math
from typing import Iterable, Sequence

from .core import PredictionRecord, ScoredPrediction, ScorerKind, predicted_class

#: Smallest vector length for which kurtosis is informative.
KRT_MIN_CLASSES = 3


def _check_finite(logits: Sequence[float], min_len: int, op: str) -> None:
    if len(logits) < min_len:
        raise ValueError(f"{op} needs at least {min_len} logits, got {len(logits)}")
    for v in logits:
        if not math.isfinite(v):
            raise ValueError(f"{op}: logits must all be finite, got {v!r}")


def score_wdf_raw(logits: Sequence[float]) -> float:
    """Unclamped winner-difference value, for diagnostics.

    Returns (Max1 - Max2) / |Max1 + Max2| where Max1 and Max2 are the two
    largest logits (with multiplicity: a duplicated maximum gives
    Max1 == Max2). A tied maximum yields 0.0, which also covers the 0/0
    case. A zero denominator with distinct maxima yields +inf.

    The raw value can exceed 1 when the top two logits have mixed signs;
    use :func:`score_wdf` for the clamped [0, 1] contract.
    """
    _check_finite(logits, 2, "WDF")
    max1, max2 = heapq.nlargest(2, logits)
    if max1 == max2:
        return 0.0
    denom = abs(max1 + max2)
    if denom == 0:
        return math.inf
    return (max1 - max2) / denom


def score_wdf(logits: Sequence[float]) -> float:
    """Winner-difference confidence in [0, 1].

    Examples: [4, 0, 0, 0] -> 1.0 (sole winner, flat tail);
    [2, 2, 1] -> 0.0 (tied winners); [3, 1, 0.5, 0.2] -> 0.5.
    """
    raw = score_wdf_raw(logits)
    if raw == math.inf:
        return 1.0
    return min(raw, 1.0)


def score_krt(logits: Sequence[float]) -> float:
    """Kurtosis confidence: mean fourth power of the standardized logits.

    Standardization uses the population standard deviation (divide by the
    number of classes, not n-1). All-equal vectors have zero deviation and
    score 0.0. The result is location- and scale-free: shifting or
    positively scaling the logits leaves it unchanged (up to rounding).

    Raises ValueError for fewer than three logits.
    """
    _check_finite(logits, KRT_MIN_CLASSES, "KRT")
    r = len(logits)
    mean = math.fsum(logits) / r
    dev = [v - mean for v in logits]
    # Pre-scale by the largest deviation so fourth powers cannot overflow.
    scale = max(abs(d) for d in dev)
    if scale == 0.0:
        return 0.0
    z = [d / scale for d in dev]
    sd = math.sqrt(math.fsum(v * v for v in z) / r)
    return math.fsum((v / sd) ** 4 for v in z) / r


_SCORE_FUNCS = {
    ScorerKind.WDF: score_wdf,
    ScorerKind.KRT: score_krt,
}


def min_classes(scorer: ScorerKind) -> int:
    """Smallest logit-vector length the scorer accepts."""
    return KRT_MIN_CLASSES if scorer is ScorerKind.KRT else 2


def score_record(record: PredictionRecord, scorer: ScorerKind) -> ScoredPrediction:
    """Score a single record with the chosen scorer."""
    return ScoredPrediction(
        record=record,
        predicted_class=predicted_class(record.logits),
        confidence=_SCORE_FUNCS[scorer](record.logits),
        scorer=scorer,
    )


def score_batch(
    records: Iterable[PredictionRecord], scorer: ScorerKind
) -> list[ScoredPrediction]:
    """Score a batch of records, preserving input order.

    All records must share one logit length, and that length must be
    acceptable to the scorer (KRT rejects binary inputs).
    """
    records = list(records)
    if not records:
        return []
    r = records[0].num_classes
    for rec in records:
        if rec.num_classes != r:
            raise ValueError(
                f"record {rec.id!r} has {rec.num_classes} logits, expected {r}: "
                "batches must share one logit length"
            )
    if r < min_classes(scorer):
        raise ValueError(
            f"{scorer} is not applicable to {r}-class input: "
            f"it needs at least {min_classes(scorer)} classes"
        )
    return [score_record(rec, scorer) for rec in records]
