"""Applying a threshold to a prediction stream and reporting on the result."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import ScoredPrediction, SplitReport


@dataclass(frozen=True, slots=True)
class SplitOutcome:
    """An exploit/waste partition plus its report.

    Both sides preserve input order; their concatenation is a permutation
    (in fact an interleaving-preserving partition) of the input.
    """

    exploit: tuple[ScoredPrediction, ...]
    waste: tuple[ScoredPrediction, ...]
    threshold_mu: float
    report: SplitReport


def _labeled(items: Sequence[ScoredPrediction]) -> bool:
    return all(item.record.label is not None for item in items)


def split(items: Sequence[ScoredPrediction], threshold_mu: float) -> SplitOutcome:
    """Partition predictions into exploit (confidence >= threshold) and waste.

    The threshold may be an accept-all (-inf) or reject-all (+inf) sentinel.
    Label-dependent report fields are filled only when every item carries a
    label. An empty input yields an exploit ratio of 0.
    """
    items = tuple(items)
    scorers = {item.scorer for item in items}
    if len(scorers) > 1:
        raise ValueError("cannot split predictions from mixed scorers")

    exploit = tuple(i for i in items if i.confidence >= threshold_mu)
    waste = tuple(i for i in items if i.confidence < threshold_mu)
    ratio = len(exploit) / len(items) if items else 0.0

    errors = successes = None
    e_accuracy = baseline = None
    if items and _labeled(items):
        errors = sum(1 for i in exploit if not i.is_correct)
        successes = len(exploit) - errors
        if exploit:
            e_accuracy = successes / len(exploit)
        baseline = sum(1 for i in items if i.is_correct) / len(items)

    report = SplitReport(
        exploit_count=len(exploit),
        waste_count=len(waste),
        exploit_ratio=ratio,
        exploit_errors=errors,
        exploit_successes=successes,
        enhanced_accuracy=e_accuracy,
        baseline_accuracy=baseline,
    )
    return SplitOutcome(exploit=exploit, waste=waste, threshold_mu=float(threshold_mu), report=report)


def enhanced_accuracy(outcome: SplitOutcome) -> float | None:
    """Accuracy measured on the exploit only; None for an empty exploit."""
    if not _labeled(outcome.exploit) or not _labeled(outcome.waste):
        raise ValueError("enhanced accuracy needs labeled predictions")
    if not outcome.exploit:
        return None
    correct = sum(1 for i in outcome.exploit if i.is_correct)
    return correct / len(outcome.exploit)


def exploit_ratio(outcome: SplitOutcome) -> float:
    """Fraction of all predictions that landed in the exploit."""
    total = len(outcome.exploit) + len(outcome.waste)
    if total == 0:
        return 0.0
    return len(outcome.exploit) / total


@dataclass(frozen=True, slots=True)
class CurveRow:
    rank: int
    confidence: float
    is_error: bool | None


def confidence_curve(items: Sequence[ScoredPrediction]) -> list[CurveRow]:
    """Plot-ready rows: predictions sorted ascending by confidence.

    The sort is stable (ties keep input order). ``is_error`` is set per row
    when the item is labeled, None otherwise.
    """
    ordered = sorted(items, key=lambda i: i.confidence)
    return [
        CurveRow(
            rank=rank,
            confidence=item.confidence,
            is_error=None if item.is_correct is None else not item.is_correct,
        )
        for rank, item in enumerate(ordered)
    ]


def macro_f1(items: Sequence[ScoredPrediction]) -> float:
    """Unweighted mean of per-class F1 over the classes observed in labels
    or predictions. A class with zero precision+recall contributes 0.

    Reported for description only; calibration always works on plain
    accuracy, so this figure never influences threshold placement.
    """
    if not items:
        raise ValueError("macro F1 needs at least one prediction")
    if not _labeled(items):
        raise ValueError("macro F1 needs labeled predictions")

    classes = sorted(
        {i.record.label for i in items} | {i.predicted_class for i in items}
    )
    scores = []
    for c in classes:
        tp = sum(1 for i in items if i.predicted_class == c and i.record.label == c)
        fp = sum(1 for i in items if i.predicted_class == c and i.record.label != c)
        fn = sum(1 for i in items if i.predicted_class != c and i.record.label == c)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return sum(scores) / len(scores)
