"""Annotation-queue ordering and threshold-gated pseudo-labeling.

Priority blends three signals over the pending pool: low predicted quality,
high predicted TER, and low LLM assessment, each min-max normalized over
the current pool. Uncertainty sampling uses the ranker's top-two margin.
All orderings break ties lexicographically by segment id so runs are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .domain import (
    Annotation,
    ErrorCategory,
    Segment,
    SegmentStatus,
    ThresholdConfig,
)
from .errors import EmptyPool
from .features import FeatureVector
from .learner import ModelState, rank_best


class Strategy(str, Enum):
    TRIPARTITE = "tripartite"
    UNCERTAINTY_MARGIN = "uncertainty_margin"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class SchedulingItem:
    """Per-segment inputs to prioritization: model estimates for the current
    best hypothesis, the best LLM assessment seen, and the ranker margin."""

    segment_id: str
    predicted_quality: float
    predicted_ter: float
    llm_score: float | None
    margin: float


@dataclass(frozen=True)
class PriorityRecord:
    segment_id: str
    priority: float
    q_norm: float
    ter_norm: float
    llm_norm: float
    margin: float
    computed_at_version: int

    @property
    def parts(self) -> dict[str, float]:
        return {
            "q_norm": self.q_norm,
            "ter_norm": self.ter_norm,
            "llm_norm": self.llm_norm,
            "margin": self.margin,
        }

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "priority": self.priority,
            "parts": self.parts,
            "computed_at_version": self.computed_at_version,
        }


def _min_max(values: Sequence[float]) -> list[float]:
    """Min-max over the pool; a constant column normalizes to 0.5."""
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.5] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def compute_priorities(
    pool: Sequence[SchedulingItem],
    cfg: ThresholdConfig,
    model_version: int = 0,
) -> list[PriorityRecord]:
    """Priority = w_q*(1-q_norm) + w_t*ter_norm + w_l*(1-llm_norm), sorted
    descending (ties by segment id). Missing LLM scores sit at the neutral
    0.5 so unscored segments are neither starved nor favored."""
    if not pool:
        raise EmptyPool("cannot prioritize an empty pool")
    q_norm = _min_max([item.predicted_quality for item in pool])
    ter_norm = _min_max([item.predicted_ter for item in pool])

    present = [item.llm_score for item in pool if item.llm_score is not None]
    if present:
        scaled = iter(_min_max(present))
        llm_norm = [
            next(scaled) if item.llm_score is not None else 0.5 for item in pool
        ]
    else:
        llm_norm = [0.5] * len(pool)

    w_q, w_t, w_l = cfg.weights
    records = [
        PriorityRecord(
            segment_id=item.segment_id,
            priority=w_q * (1 - qn) + w_t * tn + w_l * (1 - ln),
            q_norm=qn,
            ter_norm=tn,
            llm_norm=ln,
            margin=item.margin,
            computed_at_version=model_version,
        )
        for item, qn, tn, ln in zip(pool, q_norm, ter_norm, llm_norm)
    ]
    records.sort(key=lambda r: (-r.priority, r.segment_id))
    return records


def next_batch(
    pool: Sequence[SchedulingItem],
    cfg: ThresholdConfig,
    batch_size: int,
    strategy: Strategy = Strategy.TRIPARTITE,
    model_version: int = 0,
) -> list[str]:
    """First ``min(batch_size, |pool|)`` segment ids in strategy order."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    records = compute_priorities(pool, cfg, model_version)
    if strategy is Strategy.TRIPARTITE:
        ordered = records
    elif strategy is Strategy.UNCERTAINTY_MARGIN:
        ordered = sorted(records, key=lambda r: (r.margin, r.segment_id))
    elif strategy is Strategy.HYBRID:
        ordered = sorted(
            records,
            key=lambda r: (-(r.priority + (1 - r.margin)) / 2, r.segment_id),
        )
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return [r.segment_id for r in ordered[:batch_size]]


@dataclass(frozen=True)
class SegmentFeatures:
    """A segment together with one feature vector per hypothesis, in
    hypothesis order."""

    segment: Segment
    features: tuple[FeatureVector, ...]


_PENDING = (SegmentStatus.PENDING, SegmentStatus.PRIORITIZED)


def pseudo_label_pass(
    pool: Sequence[SegmentFeatures],
    state: ModelState,
    cfg: ThresholdConfig,
) -> tuple[list[Annotation], float]:
    """Auto-label every pending segment whose ranker confidence clears tau.

    Pseudo labels always carry NoEdit: auto-acceptance means the top
    hypothesis is taken as satisfactory without edits. Already-labeled
    segments are skipped, which makes a second pass over the same pool a
    no-op. Returns the annotations and the auto-labeled fraction of the
    pending pool (0.0 for an empty pool).
    """
    pending = sorted(
        (sf for sf in pool if sf.segment.status in _PENDING),
        key=lambda sf: sf.segment.id,
    )
    if not pending:
        return [], 0.0
    annotations = []
    for sf in pending:
        rank = rank_best(state, sf.features)
        confidence = rank.confidence
        if confidence >= cfg.tau:
            top = rank.order[0]
            annotations.append(
                Annotation(
                    segment_id=sf.segment.id,
                    annotator_id="pseudo",
                    chosen_provider_id=sf.segment.hypotheses[top].provider_id,
                    error_categories=frozenset({ErrorCategory.NO_EDIT}),
                    post_edit_text=None,
                    is_pseudo=True,
                    confidence=confidence,
                )
            )
    return annotations, len(annotations) / len(pending)
