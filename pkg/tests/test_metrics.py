import numpy as np
import pytest
from sklearn.metrics import f1_score

from conftest import make_scored, make_scored_set
from logitconf import (
    ACCEPT_ALL,
    REJECT_ALL,
    PredictionRecord,
    ScoredPrediction,
    ScorerKind,
    confidence_curve,
    enhanced_accuracy,
    exploit_ratio,
    macro_f1,
    split,
)


def unlabeled_scored(confidences):
    out = []
    for i, c in enumerate(confidences):
        rec = PredictionRecord(id=f"u{i}", logits=(1.0, 0.0))
        out.append(
            ScoredPrediction(record=rec, predicted_class=0, confidence=c, scorer=ScorerKind.WDF)
        )
    return out


class TestSplit:
    def test_accept_all(self):
        items = make_scored_set([0.9, 0.1], [True, False])
        outcome = split(items, ACCEPT_ALL)
        assert len(outcome.exploit) == 2 and not outcome.waste
        assert outcome.report.exploit_ratio == 1.0

    def test_reject_all(self):
        items = make_scored_set([0.9, 0.1], [True, False])
        outcome = split(items, REJECT_ALL)
        assert not outcome.exploit and len(outcome.waste) == 2
        assert outcome.report.exploit_ratio == 0.0
        assert outcome.report.enhanced_accuracy is None

    def test_inclusive_threshold(self):
        items = make_scored_set([0.9, 0.5, 0.5, 0.1], [True, True, True, True])
        outcome = split(items, 0.5)
        assert len(outcome.exploit) == 3

    def test_is_stable_partition(self):
        rng = np.random.default_rng(0)
        conf = rng.random(30).round(1)
        items = make_scored_set(conf.tolist(), (rng.random(30) < 0.5).tolist())
        outcome = split(items, 0.5)
        assert len(outcome.exploit) + len(outcome.waste) == len(items)
        # order preserved within each side
        assert [i.record.id for i in outcome.exploit] == [
            i.record.id for i in items if i.confidence >= 0.5
        ]
        assert [i.record.id for i in outcome.waste] == [
            i.record.id for i in items if i.confidence < 0.5
        ]
        merged = sorted(outcome.exploit + outcome.waste, key=lambda i: i.record.id)
        assert merged == sorted(items, key=lambda i: i.record.id)

    def test_label_fields_absent_without_labels(self):
        outcome = split(unlabeled_scored([0.9, 0.1]), 0.5)
        r = outcome.report
        assert r.exploit_count == 1
        assert r.exploit_errors is None and r.exploit_successes is None
        assert r.enhanced_accuracy is None and r.baseline_accuracy is None

    def test_label_fields_present_with_labels(self):
        items = make_scored_set([0.9, 0.8, 0.1], [True, False, True])
        r = split(items, 0.5).report
        assert (r.exploit_errors, r.exploit_successes) == (1, 1)
        assert r.enhanced_accuracy == 0.5
        assert r.baseline_accuracy == pytest.approx(2 / 3)

    def test_rejects_mixed_scorers(self):
        items = [make_scored(0.5, True), make_scored(0.5, True, scorer=ScorerKind.KRT)]
        with pytest.raises(ValueError, match="mixed"):
            split(items, 0.5)

    def test_empty_input(self):
        outcome = split([], 0.5)
        assert outcome.report.exploit_ratio == 0.0
        assert outcome.report.total == 0


class TestEnhancedAccuracy:
    def test_direct_ratio(self):
        items = make_scored_set([0.9, 0.8, 0.7, 0.6], [True, True, True, False])
        assert enhanced_accuracy(split(items, ACCEPT_ALL)) == 0.75

    def test_empty_exploit_undefined(self):
        items = make_scored_set([0.5], [True])
        assert enhanced_accuracy(split(items, REJECT_ALL)) is None

    def test_whole_set_equals_baseline(self):
        items = make_scored_set([0.9, 0.8, 0.1], [True, False, True])
        outcome = split(items, ACCEPT_ALL)
        assert enhanced_accuracy(outcome) == outcome.report.baseline_accuracy

    def test_needs_labels(self):
        with pytest.raises(ValueError):
            enhanced_accuracy(split(unlabeled_scored([0.9, 0.1]), 0.5))


class TestExploitRatio:
    def test_counts(self):
        items = make_scored_set([0.9] * 7 + [0.1] * 3, [True] * 10)
        assert exploit_ratio(split(items, 0.5)) == 0.7

    def test_sentinels(self):
        items = make_scored_set([0.9, 0.1], [True, True])
        assert exploit_ratio(split(items, ACCEPT_ALL)) == 1.0
        assert exploit_ratio(split(items, REJECT_ALL)) == 0.0

    def test_empty(self):
        assert exploit_ratio(split([], 0.5)) == 0.0


class TestConfidenceCurve:
    def test_sorted_ascending(self):
        items = make_scored_set([0.3, 0.1, 0.2], [True, True, True])
        rows = confidence_curve(items)
        assert [r.confidence for r in rows] == [0.1, 0.2, 0.3]
        assert [r.rank for r in rows] == [0, 1, 2]

    def test_ties_keep_input_order(self):
        items = make_scored_set([0.5, 0.5, 0.2], [True, False, True])
        rows = confidence_curve(items)
        # ranks 1 and 2 are the tied pair, in input order: correct then error
        assert [r.is_error for r in rows] == [False, False, True]

    def test_error_flags_match_correctness(self):
        items = make_scored_set([0.9, 0.1], [False, True])
        rows = confidence_curve(items)
        assert [(r.confidence, r.is_error) for r in rows] == [(0.1, False), (0.9, True)]

    def test_unlabeled_flags_none(self):
        rows = confidence_curve(unlabeled_scored([0.4, 0.6]))
        assert all(r.is_error is None for r in rows)

    def test_length_and_monotone(self):
        rng = np.random.default_rng(1)
        items = make_scored_set(rng.random(40).tolist(), [True] * 40)
        rows = confidence_curve(items)
        assert len(rows) == 40
        assert all(rows[i].confidence <= rows[i + 1].confidence for i in range(39))


def multiclass_scored(preds, labels, num_classes):
    items = []
    for i, (p, y) in enumerate(zip(preds, labels)):
        logits = [0.0] * num_classes
        logits[p] = 1.0
        rec = PredictionRecord(id=f"m{i}", logits=tuple(logits), label=y)
        items.append(
            ScoredPrediction(record=rec, predicted_class=p, confidence=0.5, scorer=ScorerKind.WDF)
        )
    return items


class TestMacroF1:
    def test_all_correct(self):
        items = multiclass_scored([0, 1, 2, 1], [0, 1, 2, 1], 3)
        assert macro_f1(items) == 1.0

    def test_single_class_all_wrong(self):
        items = multiclass_scored([1, 1, 1], [0, 0, 0], 2)
        assert macro_f1(items) == 0.0

    def test_symmetric_confusion(self):
        # class 0: TP=1, FP=1, FN=0 -> F1 = 2/3; class 1 symmetric... hand oracle:
        # preds [0,0,1], labels [0,1,1]: c0 TP1 FP1 FN0 -> 2/3; c1 TP1 FP0 FN1 -> 2/3
        items = multiclass_scored([0, 0, 1], [0, 1, 1], 2)
        assert macro_f1(items) == pytest.approx(2 / 3)

    def test_matches_sklearn(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 60))
            k = int(rng.integers(2, 6))
            preds = rng.integers(0, k, size=n).tolist()
            labels = rng.integers(0, k, size=n).tolist()
            items = multiclass_scored(preds, labels, k)
            observed = sorted(set(preds) | set(labels))
            expected = f1_score(
                labels, preds, labels=observed, average="macro", zero_division=0
            )
            assert macro_f1(items) == pytest.approx(expected)

    def test_needs_labels_and_items(self):
        with pytest.raises(ValueError):
            macro_f1([])
        with pytest.raises(ValueError):
            macro_f1(unlabeled_scored([0.5]))
