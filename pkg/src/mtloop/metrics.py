"""Deterministic evaluation math: TER, correlation coefficients, top-k
model-selection accuracy, improvement statistics, and per-category
precision/recall/F1.

All functions are pure and thread-safe. The tokenizer defined here is the
single shared definition used by feature extraction as well, so training
and evaluation never disagree on token boundaries.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import (
    DegenerateInput,
    EmptyInput,
    EmptyReference,
    KOutOfRange,
    LengthMismatch,
    NonPositivePreScore,
)


def tokenize(text: str) -> list[str]:
    """Case-folded split on Unicode whitespace; punctuation stays attached."""
    return text.casefold().split()


# ---------------------------------------------------------------------------
# Translation Error Rate
# ---------------------------------------------------------------------------


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Minimum insert/delete/substitute edits (unit cost) between token lists."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    cur = [0] * (m + 1)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev, cur = cur, prev
    return prev[m]


def _best_block_shift(hyp: list[str], ref: Sequence[str], base: int) -> tuple[int, list[str]]:
    """Single greedy block shift: move the matching block whose relocation
    lowers edit distance the most. Returns (gain, shifted_hypothesis)."""
    best_gain = 0
    best: list[str] = hyp
    for start in range(len(hyp)):
        for rstart in range(len(ref)):
            if start == rstart or hyp[start] != ref[rstart]:
                continue
            length = 1
            while (
                start + length < len(hyp)
                and rstart + length < len(ref)
                and hyp[start + length] == ref[rstart + length]
            ):
                length += 1
            block = hyp[start : start + length]
            rest = hyp[:start] + hyp[start + length :]
            insert_at = min(rstart, len(rest))
            shifted = rest[:insert_at] + block + rest[insert_at:]
            gain = base - edit_distance(shifted, ref)
            if gain > best_gain:
                best_gain = gain
                best = shifted
    return best_gain, best


def ter(
    hypothesis_tokens: Sequence[str],
    reference_tokens: Sequence[str],
    *,
    allow_shifts: bool = False,
) -> float:
    """Edit distance divided by reference length.

    Shift-free by default: only insertions, deletions, and substitutions are
    counted. ``allow_shifts=True`` enables a greedy block-shift pass (each
    shift costs one edit), kept off by default because exact shift search is
    intractable and the greedy variant is heuristic.
    """
    if len(reference_tokens) == 0:
        raise EmptyReference("reference token list is empty")
    hyp = list(hypothesis_tokens)
    shifts = 0
    dist = edit_distance(hyp, reference_tokens)
    if allow_shifts:
        while True:
            gain, hyp = _best_block_shift(hyp, reference_tokens, dist)
            if gain <= 0:
                break
            shifts += 1
            dist = edit_distance(hyp, reference_tokens)
    return (shifts + dist) / len(reference_tokens)


def ter_text(hypothesis: str, reference: str, *, allow_shifts: bool = False) -> float:
    """TER over the shared tokenizer's output."""
    return ter(tokenize(hypothesis), tokenize(reference), allow_shifts=allow_shifts)


# ---------------------------------------------------------------------------
# Correlation coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationReport:
    spearman: float
    pearson: float
    kendall: float
    n: int

    def __post_init__(self) -> None:
        for name in ("spearman", "pearson", "kendall"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} coefficient {v} outside [-1, 1]")
        if self.n < 2:
            raise ValueError("sample count must be >= 2")

    def to_json_dict(self) -> dict:
        return {
            "spearman": self.spearman,
            "pearson": self.pearson,
            "kendall": self.kendall,
            "n": self.n,
        }

    def to_csv_rows(self) -> list[list]:
        """Rows ``coefficient,value,n`` in the order spearman, pearson, kendall."""
        return [
            ["spearman", self.spearman, self.n],
            ["pearson", self.pearson, self.n],
            ["kendall", self.kendall, self.n],
        ]


def _rank_average(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based); tied values share the mean of their ranks."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise DegenerateInput("constant vector has no definable correlation")
    return float(np.clip((xd @ yd) / denom, -1.0, 1.0))


def _kendall_tau_b(x: np.ndarray, y: np.ndarray) -> float:
    n = len(x)
    concordant = discordant = 0
    ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                continue
            if dx == 0:
                ties_x += 1
            elif dy == 0:
                ties_y += 1
            elif (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    denom = math.sqrt(
        (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    )
    if denom == 0.0:
        raise DegenerateInput("constant vector has no definable correlation")
    return float(np.clip((concordant - discordant) / denom, -1.0, 1.0))


def correlations(x: Sequence[float], y: Sequence[float]) -> CorrelationReport:
    """Pearson on raw values, Spearman as Pearson on average ranks, and
    tie-corrected Kendall tau-b."""
    if len(x) != len(y):
        raise LengthMismatch(f"len(x)={len(x)} != len(y)={len(y)}")
    if len(x) < 2:
        raise DegenerateInput("need at least 2 samples")
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    return CorrelationReport(
        spearman=_pearson(_rank_average(xa), _rank_average(ya)),
        pearson=_pearson(xa, ya),
        kendall=_kendall_tau_b(xa, ya),
        n=len(x),
    )


# ---------------------------------------------------------------------------
# Top-k model-selection accuracy
# ---------------------------------------------------------------------------


def topk_accuracy(
    predicted_rankings: Sequence[Sequence[str]],
    true_best: Sequence[str],
    k: int,
) -> float:
    """Fraction of segments whose true best provider appears in the first
    ``k`` entries of that segment's predicted ranking."""
    if len(predicted_rankings) == 0:
        raise EmptyInput("no rankings given")
    if len(predicted_rankings) != len(true_best):
        raise LengthMismatch(
            f"{len(predicted_rankings)} rankings vs {len(true_best)} labels"
        )
    if k < 1 or any(k > len(r) for r in predicted_rankings):
        raise KOutOfRange(f"k={k} outside some ranking's length")
    hits = sum(
        1 for ranking, truth in zip(predicted_rankings, true_best) if truth in ranking[:k]
    )
    return hits / len(predicted_rankings)


# ---------------------------------------------------------------------------
# Improvement / length statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImprovementStats:
    mean_improvement_pct: float
    std_improvement_pct: float
    mean_abs_char_delta: float
    n: int

    def __post_init__(self) -> None:
        if self.std_improvement_pct < 0:
            raise ValueError("standard deviation must be >= 0")
        if self.mean_abs_char_delta < 0:
            raise ValueError("mean absolute char delta must be >= 0")
        if self.n < 1:
            raise ValueError("need at least one pair")

    def to_json_dict(self) -> dict:
        return {
            "mean_improvement_pct": self.mean_improvement_pct,
            "std_improvement_pct": self.std_improvement_pct,
            "mean_abs_char_delta": self.mean_abs_char_delta,
            "n": self.n,
        }

    def to_csv_rows(self) -> list[list]:
        """Single row; columns mean_improvement_pct, std_improvement_pct,
        mean_abs_char_delta, n."""
        return [
            [
                self.mean_improvement_pct,
                self.std_improvement_pct,
                self.mean_abs_char_delta,
                self.n,
            ]
        ]


def improvement_stats(
    pairs: Sequence[tuple[float, float, str, str]],
) -> ImprovementStats:
    """Per-pair improvement is ``100 * (post - pre) / pre``; the spread is the
    population standard deviation. Character deltas count Unicode scalar
    values of the post-edit against the original target text."""
    if len(pairs) == 0:
        raise EmptyInput("no pairs given")
    improvements = []
    char_deltas = []
    for pre, post, post_edit_text, target_text in pairs:
        if pre <= 0:
            raise NonPositivePreScore(f"pre-edit score {pre} must be > 0")
        improvements.append(100.0 * (post - pre) / pre)
        char_deltas.append(abs(len(post_edit_text) - len(target_text)))
    imp = np.asarray(improvements, dtype=np.float64)
    return ImprovementStats(
        mean_improvement_pct=float(imp.mean()),
        std_improvement_pct=float(imp.std(ddof=0)),
        mean_abs_char_delta=float(np.mean(char_deltas)),
        n=len(pairs),
    )


# ---------------------------------------------------------------------------
# Per-category classification scores
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CategoryScore:
    precision: float
    recall: float
    f1: float
    support: int
    true_positives: int
    false_positives: int
    false_negatives: int


@dataclass(frozen=True)
class CategoryPRF:
    per_category: dict[str, CategoryScore]

    def to_json_dict(self) -> dict:
        return {
            name: {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "support": s.support,
            }
            for name, s in sorted(self.per_category.items())
        }

    def to_csv_rows(self) -> list[list]:
        """One row per category, sorted by name; columns category, precision,
        recall, f1, support."""
        return [
            [name, s.precision, s.recall, s.f1, s.support]
            for name, s in sorted(self.per_category.items())
        ]


def category_prf(
    gold: Sequence[set[Hashable]],
    predicted: Sequence[set[Hashable]],
) -> CategoryPRF:
    """Multi-label precision/recall/F1: each (item, category) pair counts
    independently. Undefined precision or recall (zero denominator) reports
    0.0 with the support still recorded."""
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold items vs {len(predicted)} predictions")
    labels: set[Hashable] = set()
    for g, p in zip(gold, predicted):
        labels |= set(g) | set(p)
    scores: dict[str, CategoryScore] = {}
    for label in labels:
        tp = sum(1 for g, p in zip(gold, predicted) if label in g and label in p)
        fp = sum(1 for g, p in zip(gold, predicted) if label not in g and label in p)
        fn = sum(1 for g, p in zip(gold, predicted) if label in g and label not in p)
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        name = label.value if hasattr(label, "value") else str(label)
        scores[name] = CategoryScore(
            precision=precision,
            recall=recall,
            f1=f1,
            support=tp + fn,
            true_positives=tp,
            false_positives=fp,
            false_negatives=fn,
        )
    return CategoryPRF(per_category=scores)


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------


def report_to_json(report) -> str:
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2)


def report_to_csv(report, header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(report.to_csv_rows())
    return buf.getvalue()
