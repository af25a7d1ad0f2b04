"""Accuracy/precision/recall/F1 computation and comparison tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .labels import CATEGORY_SET
from .prediction import PredictionResult


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvaluationReport:
    model_name: str
    averaging: str  # macro | weighted
    per_class: dict[str, ClassMetrics]
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion_matrix: list[list[int]]  # rows = gold, cols = predicted
    label_order: list[str]
    excluded_classes: list[str] = field(default_factory=list)
    zero_division_classes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "model_name": self.model_name,
            "averaging": self.averaging,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class": {
                name: {"precision": m.precision, "recall": m.recall, "f1": m.f1, "support": m.support}
                for name, m in self.per_class.items()
            },
            "confusion_matrix": self.confusion_matrix,
            "label_order": self.label_order,
            "excluded_classes": self.excluded_classes,
            "zero_division_classes": self.zero_division_classes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate(
    predictions: Sequence[tuple[str, PredictionResult]],
    averaging: str = "weighted",
    model_name: str = "model",
    excluded_classes: Sequence[str] = (),
    allowed_labels: frozenset[str] = CATEGORY_SET,
) -> EvaluationReport:
    """Standard classification metrics over (gold label, prediction) pairs.

    Gold samples of excluded classes are dropped and listed, not scored.
    Classes with zero predicted positives get precision 0 and are flagged
    instead of producing NaN.
    """
    if averaging not in ("macro", "weighted"):
        raise ValueError(f"averaging must be macro or weighted, got {averaging!r}")
    excluded = set(excluded_classes)
    pairs = []
    seen_excluded = set()
    for gold, pred in predictions:
        if gold in excluded:
            seen_excluded.add(gold)
            continue
        if gold not in allowed_labels:
            raise ValueError(f"gold label {gold!r} outside the category set")
        pairs.append((gold, pred.label))
    if not pairs:
        raise ValueError("no predictions to evaluate")

    labels = sorted({g for g, _ in pairs} | {p for _, p in pairs})
    index = {name: i for i, name in enumerate(labels)}
    k = len(labels)
    cm = [[0] * k for _ in range(k)]
    for gold, predicted in pairs:
        cm[index[gold]][index[predicted]] += 1

    per_class: dict[str, ClassMetrics] = {}
    zero_division = []
    for name in labels:
        i = index[name]
        tp = cm[i][i]
        support = sum(cm[i])
        predicted_pos = sum(cm[r][i] for r in range(k))
        if predicted_pos == 0:
            precision = 0.0
            zero_division.append(name)
        else:
            precision = tp / predicted_pos
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[name] = ClassMetrics(precision, recall, f1, support)

    total = len(pairs)
    accuracy = sum(cm[i][i] for i in range(k)) / total

    scored = [name for name in labels if per_class[name].support > 0]
    if averaging == "macro":
        weights = {name: 1 / len(scored) for name in scored}
    else:
        weights = {name: per_class[name].support / total for name in scored}
    precision = sum(per_class[n].precision * w for n, w in weights.items())
    recall = sum(per_class[n].recall * w for n, w in weights.items())
    f1 = sum(per_class[n].f1 * w for n, w in weights.items())

    return EvaluationReport(
        model_name=model_name,
        averaging=averaging,
        per_class=per_class,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        confusion_matrix=cm,
        label_order=labels,
        excluded_classes=sorted(seen_excluded),
        zero_division_classes=zero_division,
    )


@dataclass
class ComparisonRow:
    model_name: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    best: list[str] = field(default_factory=list)  # columns where this row leads


def compare(reports: Sequence[EvaluationReport]) -> list[ComparisonRow]:
    """Rank reports by F1 descending and mark the best value per column."""
    names = [r.model_name for r in reports]
    if len(names) != len(set(names)):
        raise ValueError(f"duplicate model names in comparison: {names}")
    rows = [
        ComparisonRow(r.model_name, r.accuracy, r.precision, r.recall, r.f1)
        for r in sorted(reports, key=lambda r: r.f1, reverse=True)
    ]
    for column in ("accuracy", "precision", "recall", "f1"):
        best = max(getattr(row, column) for row in rows)
        for row in rows:
            if getattr(row, column) == best:
                row.best.append(column)
    return rows


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "accuracy", "precision", "recall", "f1"])
    for row in rows:
        writer.writerow(
            [row.model_name, f"{row.accuracy:.4f}", f"{row.precision:.4f}", f"{row.recall:.4f}", f"{row.f1:.4f}"]
        )
    return buf.getvalue()


def comparison_markdown(rows: Sequence[ComparisonRow]) -> str:
    lines = [
        "| Model | Accuracy | Precision | Recall | F1 |",
        "|---|---|---|---|---|",
    ]
    for row in rows:
        cells = []
        for column in ("accuracy", "precision", "recall", "f1"):
            value = f"{getattr(row, column):.4f}"
            cells.append(f"**{value}**" if column in row.best else value)
        lines.append(f"| {row.model_name} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
