"""Threshold calibration on a labeled, scored test set.

Given a target confidence level q, calibration derives an error budget from
the set's baseline accuracy p (at most ``floor(e * (1-q) / (1-p))`` of the
e existing errors may enter the exploit) and then searches for the smallest
confidence threshold whose exploit both stays within that budget and keeps
its relative error at or below 1 - q. The smallest admissible threshold is
chosen so the exploit is as large as possible.

Thresholding is inclusive: a prediction with confidence exactly equal to
the threshold lands in the exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    ACCEPT_ALL,
    REJECT_ALL,
    CalibrationArtifact,
    ScoredPrediction,
    ScorerKind,
)


@dataclass(frozen=True, slots=True)
class LabeledScoredSet:
    """A non-empty batch of scored predictions, all labeled, all from one
    scorer, all with the same number of classes."""

    items: tuple[ScoredPrediction, ...]
    num_errors: int
    num_successes: int

    @classmethod
    def from_predictions(cls, items: Sequence[ScoredPrediction]) -> "LabeledScoredSet":
        items = tuple(items)
        if not items:
            raise ValueError("labeled set must not be empty")
        scorer = items[0].scorer
        r = items[0].record.num_classes
        errors = 0
        for item in items:
            if item.record.label is None:
                raise ValueError(f"record {item.record.id!r} has no label")
            if item.scorer is not scorer:
                raise ValueError("all items must share one scorer kind")
            if item.record.num_classes != r:
                raise ValueError("all items must share one logit length")
            if not item.is_correct:
                errors += 1
        return cls(items=items, num_errors=errors, num_successes=len(items) - errors)

    def __len__(self) -> int:
        return len(self.items)

    @property
    def scorer(self) -> ScorerKind:
        return self.items[0].scorer

    @property
    def num_classes(self) -> int:
        return self.items[0].record.num_classes

    @property
    def accuracy(self) -> float:
        return self.num_successes / len(self.items)


def relative_error_in_exploit(
    scored: LabeledScoredSet, threshold_mu: float
) -> float | None:
    """Fraction of wrong predictions among those with confidence >= threshold.

    Returns None (undefined) when nothing clears the threshold.
    """
    errors = 0
    total = 0
    for item in scored.items:
        if item.confidence >= threshold_mu:
            total += 1
            if not item.is_correct:
                errors += 1
    if total == 0:
        return None
    return errors / total


def error_budget(total_errors: int, baseline_accuracy: float, confidence_level: float) -> int:
    """Largest number of existing errors the exploit may keep while still
    meeting the confidence level: floor(e * (1-q) / (1-p)).

    When the requested level is at or below the baseline accuracy no
    filtering is needed and every error is allowed. A level of 1.0 allows
    none. The floor is computed in exact rational arithmetic so borderline
    ratios never round the wrong way.
    """
    e = int(total_errors)
    if e < 0:
        raise ValueError("total_errors must be non-negative")
    p = Fraction(baseline_accuracy)
    q = Fraction(confidence_level)
    if not 0 <= p <= 1:
        raise ValueError(f"baseline accuracy must be in [0, 1], got {baseline_accuracy}")
    if not 0 < q <= 1:
        raise ValueError(f"confidence level must be in (0, 1], got {confidence_level}")
    if q <= p:
        return e
    if q == 1:
        return 0
    return math.floor(e * (1 - q) / (1 - p))


def _sorted_conf_err(scored: LabeledScoredSet) -> tuple[np.ndarray, np.ndarray]:
    conf = np.array([item.confidence for item in scored.items], dtype=float)
    wrong = np.array([not item.is_correct for item in scored.items], dtype=bool)
    order = np.argsort(-conf, kind="stable")
    return conf[order], np.cumsum(wrong[order])


def find_threshold(
    scored: LabeledScoredSet,
    budget: int,
    max_relative_error: Fraction | float | None = None,
) -> float:
    """Smallest confidence value occurring in the set whose (inclusive)
    exploit contains at most ``budget`` erroneous predictions.

    With ``max_relative_error`` set, the exploit must additionally keep its
    error fraction at or below that bound (compared exactly, in rationals).
    A budget covering every error returns the accept-all sentinel. When even
    the highest-confidence tie group violates a constraint there is no
    admissible threshold and the reject-all sentinel is returned, marking
    the calibration degenerate.
    """
    e = scored.num_errors
    if not 0 <= budget <= e:
        raise ValueError(f"budget must be in [0, {e}], got {budget}")
    if budget >= e:
        return ACCEPT_ALL
    max_rel = None if max_relative_error is None else Fraction(max_relative_error)

    conf, err_cum = _sorted_conf_err(scored)
    n = len(conf)
    best = REJECT_ALL
    i = 0
    while i < n:
        # Advance to the end of the tie group: exploit boundaries sit at
        # distinct confidence values under the inclusive rule.
        j = i
        while j + 1 < n and conf[j + 1] == conf[i]:
            j += 1
        errors = int(err_cum[j])
        if errors > budget:
            break  # error count only grows as the threshold drops
        if max_rel is None or Fraction(errors, j + 1) <= max_rel:
            best = float(conf[i])
        i = j + 1
    return best


def calibrate(scored: LabeledScoredSet, confidence_level: float) -> CalibrationArtifact:
    """Calibrate a confidence threshold for the requested level.

    Computes the baseline accuracy and error budget from the set, then
    searches for the smallest threshold whose exploit stays within the
    budget and whose accuracy meets the level. A degenerate search result
    (reject-all sentinel) is preserved in the artifact, never dropped.
    """
    n = len(scored)
    q = float(confidence_level)
    if not 0 < q <= 1:
        raise ValueError(f"confidence level must be in (0, 1], got {confidence_level}")
    # Compare q against the same float accuracy the artifact stores, so the
    # accept-all rule here and its invariant check can never disagree.
    p = scored.accuracy
    budget = error_budget(scored.num_errors, p, q)
    if q <= p:
        threshold = ACCEPT_ALL
    else:
        threshold = find_threshold(scored, budget, max_relative_error=1 - Fraction(q))
    return CalibrationArtifact(
        scorer=scored.scorer,
        confidence_level_q=q,
        baseline_accuracy_p=p,
        threshold_mu=threshold,
        error_budget_e_mu=budget,
        total_errors_e=scored.num_errors,
        testset_size_n=n,
        num_classes_r=scored.num_classes,
    )


@dataclass(frozen=True, slots=True)
class FractionStability:
    """Threshold statistics for one subsample fraction.

    ``thresholds`` holds one entry per repeat: a float, or None when the
    subsample contained no errors (threshold undefined). Sentinel (infinite)
    thresholds are kept in ``thresholds`` but excluded from the aggregates,
    like undefined cells.
    """

    fraction: float
    sample_size: int
    thresholds: tuple[float | None, ...]
    num_defined: int
    mean: float | None
    min: float | None
    max: float | None
    spread: float | None


@dataclass(frozen=True, slots=True)
class StabilityReport:
    """Per-fraction threshold stability under repeated random subsampling."""

    scorer: ScorerKind
    error_fraction: float
    seed: int
    repeats: int
    full_set_threshold: float
    rows: tuple[FractionStability, ...]

    def max_deviation(self) -> float | None:
        """Largest |threshold - full_set_threshold| over all defined cells."""
        if not math.isfinite(self.full_set_threshold):
            return None
        devs = [
            abs(t - self.full_set_threshold)
            for row in self.rows
            for t in row.thresholds
            if t is not None and math.isfinite(t)
        ]
        return max(devs) if devs else None


def _subsample_threshold(
    scored: LabeledScoredSet, idx: np.ndarray, error_fraction: float
) -> float | None:
    sub = [scored.items[i] for i in idx]
    errors = sum(1 for item in sub if not item.is_correct)
    if errors == 0:
        return None
    budget = int(error_fraction * errors)
    return find_threshold(LabeledScoredSet.from_predictions(sub), budget)


def stability_experiment(
    scored: LabeledScoredSet,
    fractions: Sequence[float],
    error_fraction: float,
    seed: int,
    repeats: int,
) -> StabilityReport:
    """Measure how stable the calibrated threshold is under subsampling.

    For each fraction, draws ``repeats`` subsamples without replacement and
    recomputes the threshold that admits ``floor(error_fraction * errors)``
    of the subsample's errors. Deterministic for a given seed. Cells whose
    subsample contains no errors are reported as undefined rather than
    failing the experiment.
    """
    if not fractions:
        raise ValueError("need at least one fraction")
    for f in fractions:
        if not 0 < f <= 1:
            raise ValueError(f"fractions must be in (0, 1], got {f}")
    if not 0 <= error_fraction <= 1:
        raise ValueError(f"error_fraction must be in [0, 1], got {error_fraction}")
    if repeats < 1:
        raise ValueError("repeats must be positive")

    n = len(scored)
    full_budget = int(error_fraction * scored.num_errors)
    full_threshold = find_threshold(scored, full_budget)

    rng = np.random.default_rng(seed)
    rows = []
    for fraction in fractions:
        size = min(n, max(1, round(fraction * n)))
        cells: list[float | None] = []
        for _ in range(repeats):
            idx = rng.choice(n, size=size, replace=False)
            cells.append(_subsample_threshold(scored, idx, error_fraction))
        defined = [t for t in cells if t is not None and math.isfinite(t)]
        rows.append(
            FractionStability(
                fraction=float(fraction),
                sample_size=size,
                thresholds=tuple(cells),
                num_defined=len(defined),
                mean=(sum(defined) / len(defined)) if defined else None,
                min=min(defined) if defined else None,
                max=max(defined) if defined else None,
                spread=(max(defined) - min(defined)) if defined else None,
            )
        )
    return StabilityReport(
        scorer=scored.scorer,
        error_fraction=float(error_fraction),
        seed=seed,
        repeats=repeats,
        full_set_threshold=full_threshold,
        rows=tuple(rows),
    )
