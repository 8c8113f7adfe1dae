"""Three-way confusion counts with precision, recall and accuracy.

Precision and recall pool the yes and no classes and treat an unknown
prediction as an abstention:

    precision = correct yes/no predictions / yes/no predictions
    recall    = correct yes/no predictions / yes/no gold labels

A zero denominator yields 1.0 and is listed in ``undefined``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .corpus import LABELS


@dataclass
class Metrics:
    confusion: dict
    precision: Fraction
    recall: Fraction
    accuracy: Fraction
    total: int
    undefined: list = field(default_factory=list)

    def to_dict(self):
        return {
            "precision": float(self.precision),
            "recall": float(self.recall),
            "accuracy": float(self.accuracy),
            "total": self.total,
            "confusion": self.confusion,
            "undefined": list(self.undefined),
        }


def _ratio(num, den, name, undefined):
    if den == 0:
        undefined.append(name)
        return Fraction(1)
    return Fraction(num, den)


def compute_metrics(pairs):
    """``pairs`` are (gold, predicted) label pairs."""
    confusion = {g: {p: 0 for p in LABELS} for g in LABELS}
    for gold, pred in pairs:
        confusion[gold][pred] += 1
    total = sum(sum(row.values()) for row in confusion.values())
    correct = sum(confusion[c][c] for c in LABELS)
    decided = [c for c in LABELS if c != "unknown"]
    hits = sum(confusion[c][c] for c in decided)
    predicted = sum(confusion[g][p] for g in LABELS for p in decided)
    gold_pos = sum(confusion[g][p] for g in decided for p in LABELS)
    undefined = []
    return Metrics(
        confusion=confusion,
        precision=_ratio(hits, predicted, "precision", undefined),
        recall=_ratio(hits, gold_pos, "recall", undefined),
        accuracy=_ratio(correct, total, "accuracy", undefined),
        total=total,
        undefined=undefined,
    )
