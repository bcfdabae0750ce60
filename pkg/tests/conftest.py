from logitconf import PredictionRecord, ScoredPrediction, ScorerKind


def make_scored(confidence, correct, scorer=ScorerKind.WDF, rid="x"):
    """Build a ScoredPrediction whose label agrees/disagrees with the winner.

    The logits are a fixed 2-class vector with argmax 0; correctness is
    steered through the label, and the confidence value is free (it is not
    required to be reproducible from the logits).
    """
    record = PredictionRecord(id=rid, logits=(1.0, 0.0), label=0 if correct else 1)
    return ScoredPrediction(
        record=record, predicted_class=0, confidence=confidence, scorer=scorer
    )


def make_scored_set(confidences, correctness, scorer=ScorerKind.WDF):
    return [
        make_scored(c, ok, scorer=scorer, rid=f"r{i}")
        for i, (c, ok) in enumerate(zip(confidences, correctness))
    ]
