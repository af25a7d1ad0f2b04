import random

import pytest
from sklearn.metrics import (
    accuracy_score,
    precision_recall_fscore_support,
)

from crimecat.evaluator import (
    ClassMetrics,
    EvaluationReport,
    compare,
    comparison_csv,
    comparison_markdown,
    evaluate,
)
from crimecat.labels import CATEGORIES
from crimecat.prediction import PredictionResult, argmax_label


def _pred(label, labels):
    scores = {name: 0.0 for name in labels}
    scores[label] = 1.0
    return PredictionResult(label=label, scores=scores)


def _pairs(gold, predicted):
    labels = sorted(set(gold) | set(predicted))
    return [(g, _pred(p, labels)) for g, p in zip(gold, predicted)]


FF, RW = "Financial Fraud", "Ransomware"


class TestArgmax:
    def test_tie_breaks_to_lowest_index(self):
        scores = {"b": 0.5, "a": 0.5}
        assert argmax_label(scores, ["b", "a"]) == "b"
        assert argmax_label(scores, ["a", "b"]) == "a"


class TestEvaluate:
    def test_hand_computed_two_class_case(self):
        # gold FF FF RW RW; predicted FF RW RW RW
        report = evaluate(_pairs([FF, FF, RW, RW], [FF, RW, RW, RW]), averaging="macro")
        assert report.accuracy == pytest.approx(0.75)
        ff = report.per_class[FF]
        assert (ff.precision, ff.recall) == (1.0, 0.5)
        assert ff.f1 == pytest.approx(2 / 3)
        rw = report.per_class[RW]
        assert rw.precision == pytest.approx(2 / 3)
        assert rw.recall == 1.0
        assert rw.f1 == pytest.approx(0.8)
        assert report.precision == pytest.approx(5 / 6)
        assert report.recall == pytest.approx(0.75)
        assert report.f1 == pytest.approx((2 / 3 + 0.8) / 2)

    def test_confusion_matrix_layout(self):
        report = evaluate(_pairs([FF, FF, RW, RW], [FF, RW, RW, RW]))
        assert report.label_order == [FF, RW]
        assert report.confusion_matrix == [[1, 1], [0, 2]]

    def test_perfect_predictions(self):
        report = evaluate(_pairs([FF, RW, FF], [FF, RW, FF]))
        assert (report.accuracy, report.precision, report.recall, report.f1) == (1, 1, 1, 1)

    def test_zero_predicted_positives_flagged_not_nan(self):
        report = evaluate(_pairs([FF, RW], [FF, FF]))
        assert report.zero_division_classes == [RW]
        assert report.per_class[RW].precision == 0.0
        assert report.per_class[RW].f1 == 0.0

    def test_excluded_classes_dropped_and_listed(self):
        pairs = _pairs([FF, FF, RW, "Cyber Terrorism"], [FF, FF, RW, RW])
        report = evaluate(pairs, excluded_classes=["Cyber Terrorism"])
        assert report.excluded_classes == ["Cyber Terrorism"]
        assert report.accuracy == 1.0

    def test_unknown_gold_label_rejected(self):
        with pytest.raises(ValueError):
            evaluate([("Made Up Crime", _pred(FF, [FF]))])

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            evaluate([])

    def test_bad_averaging(self):
        with pytest.raises(ValueError):
            evaluate(_pairs([FF], [FF]), averaging="micro")

    @pytest.mark.parametrize("averaging,sk_avg", [("macro", "macro"), ("weighted", "weighted")])
    def test_matches_reference_implementation_on_random_sets(self, averaging, sk_avg):
        rng = random.Random(13)
        labels = CATEGORIES[:5]
        for _ in range(100):
            n = rng.randint(5, 60)
            gold = [rng.choice(labels) for _ in range(n)]
            predicted = [rng.choice(labels) for _ in range(n)]
            report = evaluate(_pairs(gold, predicted), averaging=averaging)
            assert report.accuracy == pytest.approx(accuracy_score(gold, predicted), abs=1e-12)
            # averages run over gold-supported classes only
            p, r, f, _ = precision_recall_fscore_support(
                gold, predicted, average=sk_avg, zero_division=0,
                labels=sorted(set(gold)),
            )
            assert report.precision == pytest.approx(p, abs=1e-12)
            assert report.recall == pytest.approx(r, abs=1e-12)
            assert report.f1 == pytest.approx(f, abs=1e-12)

    def test_report_json_round_trip(self):
        import json

        report = evaluate(_pairs([FF, RW], [FF, RW]))
        data = json.loads(report.to_json())
        assert data["schema_version"] == 1
        assert data["accuracy"] == 1.0
        assert data["per_class"][FF]["support"] == 1


def _report(name, acc, prec, rec, f1):
    return EvaluationReport(
        model_name=name, averaging="weighted", per_class={},
        accuracy=acc, precision=prec, recall=rec, f1=f1,
        confusion_matrix=[], label_order=[],
    )


class TestCompare:
    def test_sorted_by_f1_descending(self):
        rows = compare([_report("a", 0.5, 0.5, 0.5, 0.5), _report("b", 0.6, 0.6, 0.6, 0.6)])
        assert [r.model_name for r in rows] == ["b", "a"]

    def test_best_marks(self):
        rows = compare([
            _report("a", 0.9, 0.5, 0.5, 0.5),
            _report("b", 0.6, 0.6, 0.6, 0.6),
        ])
        by_name = {r.model_name: r for r in rows}
        assert by_name["a"].best == ["accuracy"]
        assert by_name["b"].best == ["precision", "recall", "f1"]

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            compare([_report("a", 1, 1, 1, 1), _report("a", 1, 1, 1, 1)])

    def test_classical_reference_table_renders_exactly(self):
        reports = [
            _report("XGBoost", 0.68, 0.67, 0.69, 0.68),
            _report("Random Forest", 0.65, 0.56, 0.65, 0.52),
            _report("AdaBoost", 0.65, 0.43, 0.65, 0.52),
            _report("kNN", 0.68, 0.65, 0.68, 0.66),
        ]
        assert comparison_csv(compare(reports)) == (
            "model,accuracy,precision,recall,f1\n"
            "XGBoost,0.6800,0.6700,0.6900,0.6800\n"
            "kNN,0.6800,0.6500,0.6800,0.6600\n"
            "Random Forest,0.6500,0.5600,0.6500,0.5200\n"
            "AdaBoost,0.6500,0.4300,0.6500,0.5200\n"
        )

    def test_transformer_reference_table_renders_exactly(self):
        reports = [
            _report("BERT", 0.7103, 0.7051, 0.7163, 0.7073),
            _report("RoBERTa", 0.7164, 0.7082, 0.7104, 0.7090),
            _report("HingBERT", 0.7282, 0.7038, 0.7282, 0.7102),
            _report("HingRoBERTa", 0.7441, 0.7086, 0.7441, 0.7149),
        ]
        assert comparison_csv(compare(reports)) == (
            "model,accuracy,precision,recall,f1\n"
            "HingRoBERTa,0.7441,0.7086,0.7441,0.7149\n"
            "HingBERT,0.7282,0.7038,0.7282,0.7102\n"
            "RoBERTa,0.7164,0.7082,0.7104,0.7090\n"
            "BERT,0.7103,0.7051,0.7163,0.7073\n"
        )

    def test_markdown_bolds_best(self):
        rows = compare([_report("a", 0.5, 0.5, 0.5, 0.5), _report("b", 0.6, 0.6, 0.6, 0.6)])
        md = comparison_markdown(rows)
        assert "| b | **0.6000** | **0.6000** | **0.6000** | **0.6000** |" in md
        assert "| a | 0.5000 | 0.5000 | 0.5000 | 0.5000 |" in md
