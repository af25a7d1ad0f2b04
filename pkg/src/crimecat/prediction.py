"""Shared prediction contract for transformer and classical models."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class PredictionResult:
    label: str
    scores: dict[str, float]
    model_fingerprint: str = ""
    flags: list[str] = field(default_factory=list)  # e.g. out_of_vocabulary

    def __post_init__(self):
        total = sum(self.scores.values())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"scores sum to {total}, expected 1 ± 1e-6")
        if self.label not in self.scores:
            raise ValueError(f"label {self.label!r} missing from scores")


def argmax_label(scores: dict[str, float], label_order: list[str]) -> str:
    """Highest-scoring label; ties break to the lowest label_order index."""
    best = None
    for name in label_order:
        if best is None or scores[name] > scores[best]:
            best = name
    assert best is not None
    return best
