"""Threshold rules, per-feature votes, and (weighted) majority voting."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .features import FEATURES, FeatureVector


class Emotion(str, Enum):
    DISGUST = "Disgust"
    SURPRISE = "Surprise"
    ANGRY = "Angry"
    NEUTRAL = "Neutral"
    HAPPY = "Happy"

    @classmethod
    def parse(cls, text: str) -> "Emotion":
        for e in cls:
            if e.value.lower() == text.strip().lower():
                return e
        raise ValueError(f"unknown emotion {text!r}")


# rule-table row order doubles as the tie-break order everywhere
EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)

# weight and accuracy tables list features in this order
WEIGHT_FEATURES = ("ebm", "lc", "ebc", "w", "mo")

LOW, HIGH = "Low", "High"


def side(value: float, threshold: float) -> str:
    """Equality resolves to the high side."""
    return HIGH if value >= threshold else LOW


DEFAULT_THRESHOLDS = {"mo": 25.0, "lc": 50.0, "w": 200.0, "ebc": 0.5, "ebm": 0.7}

_H, _L = HIGH, LOW
DEFAULT_ROWS = {
    #                  mo  lc  w   ebc ebm
    Emotion.DISGUST:  (_L, _L, _H, _L, _L),
    Emotion.SURPRISE: (_H, _H, _H, _H, _H),
    Emotion.ANGRY:    (_L, _L, _L, _L, _L),
    Emotion.NEUTRAL:  (_L, _L, _L, _H, _H),
    Emotion.HAPPY:    (_H, _H, _L, _H, _H),
}


@dataclass(frozen=True)
class RuleTable:
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    rows: dict = field(default_factory=lambda: dict(DEFAULT_ROWS))

    def __post_init__(self):
        if set(self.thresholds) != set(FEATURES):
            raise ValueError(f"thresholds must cover exactly {FEATURES}")
        if any(t <= 0 for t in self.thresholds.values()):
            raise ValueError("thresholds must be strictly positive")
        if set(self.rows) != set(EMOTIONS):
            raise ValueError("rule rows must cover the five emotions")

    def sides(self, fv: FeatureVector) -> tuple[str, ...]:
        return tuple(side(getattr(fv, f), self.thresholds[f]) for f in FEATURES)

    def format(self) -> str:
        """Canonical text form, one line per emotion."""
        cmp = {HIGH: ">=", LOW: "<"}
        head = "emotion    " + " ".join(f"{f.upper():>8}" for f in FEATURES)
        lines = [head]
        for e in EMOTIONS:
            cells = [f"{cmp[s]}{self.thresholds[f]:g}" for f, s in zip(FEATURES, self.rows[e])]
            lines.append(f"{e.value:<10} " + " ".join(f"{c:>8}" for c in cells))
        return "\n".join(lines)


@dataclass(frozen=True)
class WeightMatrix:
    """weights[emotion][feature] for the five emotions and WEIGHT_FEATURES."""

    weights: dict
    strict: bool = True

    def __post_init__(self):
        for e in EMOTIONS:
            row = self.weights[e]
            if set(row) != set(WEIGHT_FEATURES):
                raise ValueError(f"weight row for {e.value} must cover {WEIGHT_FEATURES}")
            if any(v < 0 for v in row.values()):
                raise ValueError("weights must be non-negative")
            if self.strict and abs(sum(row.values()) - 1.0) > 1e-9:
                raise ValueError(f"weight row for {e.value} sums to {sum(row.values())}")

    def __getitem__(self, emotion: Emotion) -> dict:
        return self.weights[emotion]

    def format(self) -> str:
        lines = ["emotion    " + " ".join(f"{f.upper():>8}" for f in WEIGHT_FEATURES)]
        for e in EMOTIONS:
            lines.append(f"{e.value:<10} " + " ".join(f"{self.weights[e][f]:8.4f}" for f in WEIGHT_FEATURES))
        return "\n".join(lines)


# per-emotion accuracy (%) of each single-feature classifier, EBM LC EBC W MO
FEATURE_ACCURACY = {
    Emotion.DISGUST:  (70, 99, 99, 61, 99),
    Emotion.HAPPY:    (75, 98, 90, 67.46, 97),
    Emotion.SURPRISE: (80, 98, 98, 63, 96),
    Emotion.ANGRY:    (80, 97, 98, 65, 98),
    Emotion.NEUTRAL:  (90, 99, 99, 70, 97),
}

# weights as printed for the two emotions that have them; they do not follow
# from FEATURE_ACCURACY (the disgust row sums to 1.051)
PRINTED_WEIGHTS = {
    Emotion.DISGUST: (0.183, 0.236, 0.236, 0.160, 0.236),
    Emotion.HAPPY:   (0.1943, 0.2305, 0.1787, 0.1735, 0.222),
}


def compute_weights(acc: dict) -> WeightMatrix:
    """Normalise each emotion's accuracy row so it sums to one.

    ``acc`` maps emotion to either a WEIGHT_FEATURES-ordered sequence or a
    feature->accuracy dict.
    """
    weights = {}
    for e in EMOTIONS:
        row = acc[e]
        if not isinstance(row, dict):
            row = dict(zip(WEIGHT_FEATURES, row))
        if any(v <= 0 for v in row.values()):
            raise ValueError(f"accuracies must be positive, got {row} for {e.value}")
        total = sum(row.values())
        weights[e] = {f: row[f] / total for f in WEIGHT_FEATURES}
    return WeightMatrix(weights)


def default_weights() -> WeightMatrix:
    return compute_weights(FEATURE_ACCURACY)


def printed_weights() -> WeightMatrix:
    """Printed weights for Disgust and Happy, normalised accuracies elsewhere.

    Not row-normalised; use only to compare against the printed values.
    """
    base = default_weights().weights
    merged = {e: dict(zip(WEIGHT_FEATURES, PRINTED_WEIGHTS[e])) if e in PRINTED_WEIGHTS else base[e]
              for e in EMOTIONS}
    return WeightMatrix(merged, strict=False)


@dataclass(frozen=True)
class Decision:
    label: Emotion
    method: str
    scores: dict
    fallback_used: bool = False

    def as_dict(self) -> dict:
        return {
            "label": self.label.value,
            "method": self.method,
            "scores": {e.value: round(float(s), 12) for e, s in self.scores.items()},
            "fallback_used": self.fallback_used,
        }


def _argmax(scores: dict, candidates=EMOTIONS) -> Emotion:
    # max() keeps the first of equal keys, i.e. rule-table order
    return max(candidates, key=lambda e: scores[e])


def rule_classify(fv: FeatureVector, rules: RuleTable = RuleTable()) -> Decision:
    """Exact row match, else the row with the fewest mismatched sides."""
    sides = rules.sides(fv)
    matches = {e: sum(a == b for a, b in zip(sides, rules.rows[e])) for e in EMOTIONS}
    label = _argmax(matches)
    return Decision(label, "rules", matches, fallback_used=matches[label] < len(FEATURES))


def feature_votes(fv: FeatureVector, rules: RuleTable = RuleTable()) -> dict:
    """feature -> frozenset of emotions whose rule for that feature is satisfied."""
    votes = {}
    for i, f in enumerate(FEATURES):
        s = side(getattr(fv, f), rules.thresholds[f])
        votes[f] = frozenset(e for e in EMOTIONS if rules.rows[e][i] == s)
    return votes


def weighted_majority_vote(votes: dict, wm: WeightMatrix | None = None) -> Decision:
    wm = wm or default_weights()
    scores = {e: sum(wm[e][f] for f in WEIGHT_FEATURES if e in votes[f]) for e in EMOTIONS}
    label = _argmax(scores)
    return Decision(label, "wmv", scores, fallback_used=scores[label] <= 0)


def majority_vote(votes: dict, wm: WeightMatrix | None = None) -> Decision:
    """At least three of five feature votes decide; otherwise weighted voting does."""
    wm = wm or default_weights()
    counts = {e: sum(e in votes[f] for f in FEATURES) for e in EMOTIONS}
    best = max(counts.values())
    if best < 3:
        fallback = weighted_majority_vote(votes, wm)
        return Decision(fallback.label, "mv", fallback.scores, fallback_used=True)
    tied = [e for e in EMOTIONS if counts[e] == best]
    if len(tied) > 1:
        weighted = weighted_majority_vote(votes, wm).scores
        label = _argmax(weighted, tied)
    else:
        label = tied[0]
    return Decision(label, "mv", {e: float(c) for e, c in counts.items()})


METHODS = ("rules", "mv", "wmv")


def classify(fv: FeatureVector, method: str = "wmv", rules: RuleTable = RuleTable(),
             wm: WeightMatrix | None = None) -> Decision:
    if method == "rules":
        return rule_classify(fv, rules)
    votes = feature_votes(fv, rules)
    if method == "mv":
        return majority_vote(votes, wm)
    if method == "wmv":
        return weighted_majority_vote(votes, wm)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def accuracy(pairs) -> float:
    """Percentage of (predicted, actual) pairs that agree."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("accuracy of an empty set is undefined")
    return 100.0 * sum(p == t for p, t in pairs) / len(pairs)
