"""Seeded synthetic prediction-record generator.

Generative model per record: a gold label is drawn uniformly; with
probability ``target_accuracy`` the winner class is the gold class,
otherwise a uniformly-chosen wrong class. Base logits are i.i.d. normal and
the winner logit is lifted above the rest by a margin drawn from an
exponential distribution, scaled by ``margin_strength`` for correct
predictions and by a quarter of that for errors. Larger winner margins for
correct predictions make confidence correlate with correctness.

With ``margin_strength=0`` both margins collapse to the fixed floor, so
confidence carries no information about correctness (negative control).
"""

from __future__ import annotations

import numpy as np

from .core import PredictionRecord

# Base logit distribution. The positive location keeps winner + runner-up
# sums positive, so confidence varies smoothly instead of saturating.
BASE_LOC = 2.0
BASE_SCALE = 1.0
# Error margins use this fraction of the correct-case exponential scale.
ERROR_MARGIN_FACTOR = 0.25
# Strictly positive floor: the winner always wins outright, so the file's
# empirical accuracy equals the Bernoulli draw even at margin_strength 0.
MARGIN_FLOOR = 0.05


def generate_records(
    n: int,
    num_classes: int,
    target_accuracy: float,
    margin_strength: float,
    seed: int,
    id_prefix: str = "synth",
) -> list[PredictionRecord]:
    """Generate ``n`` labeled records; bit-identical for a given seed."""
    if n < 1:
        raise ValueError("n must be positive")
    if num_classes < 2:
        raise ValueError("need at least 2 classes")
    if not 0 <= target_accuracy <= 1:
        raise ValueError(f"target_accuracy must be in [0, 1], got {target_accuracy}")
    if margin_strength < 0:
        raise ValueError(f"margin_strength must be >= 0, got {margin_strength}")

    rng = np.random.default_rng(seed)
    gold = rng.integers(0, num_classes, size=n)
    correct = rng.random(n) < target_accuracy
    offset = rng.integers(1, num_classes, size=n)
    winner = np.where(correct, gold, (gold + offset) % num_classes)

    logits = rng.normal(BASE_LOC, BASE_SCALE, size=(n, num_classes))
    scale = np.where(correct, margin_strength, margin_strength * ERROR_MARGIN_FACTOR)
    margin = MARGIN_FLOOR + rng.exponential(1.0, size=n) * scale

    rows = np.arange(n)
    masked = logits.copy()
    masked[rows, winner] = -np.inf
    logits[rows, winner] = masked.max(axis=1) + margin

    width = len(str(n - 1))
    return [
        PredictionRecord(
            id=f"{id_prefix}-{i:0{width}d}",
            logits=tuple(float(v) for v in logits[i]),
            label=int(gold[i]),
        )
        for i in range(n)
    ]
