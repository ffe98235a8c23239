"""Shared data model for segments, hypotheses, annotations, providers, and
scheduling config.

Values are immutable; construction never raises on invariant violations so
that ``validate_segment`` / ``validate_annotation`` can report every broken
invariant of a candidate object. Mutation happens only through the store's
single writer; instances are safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

from .errors import IllegalTransition

MAX_HYPOTHESES = 10

WEIGHT_SUM_TOLERANCE = 1e-9


class SegmentStatus(str, Enum):
    PENDING = "Pending"
    PRIORITIZED = "Prioritized"
    AUTO_LABELED = "AutoLabeled"
    HUMAN_LABELED = "HumanLabeled"


# Lifecycle progresses strictly forward; skipping ahead is allowed (a pending
# segment may be auto-labeled without ever being prioritized), going back is
# not. AutoLabeled -> HumanLabeled is the human-verification promotion.
_STATUS_RANK = {
    SegmentStatus.PENDING: 0,
    SegmentStatus.PRIORITIZED: 1,
    SegmentStatus.AUTO_LABELED: 2,
    SegmentStatus.HUMAN_LABELED: 3,
}


class ErrorCategory(str, Enum):
    ACCURACY = "Accuracy"
    FLUENCY = "Fluency"
    TERMINOLOGY = "Terminology"
    LOCALE_CONVENTION = "LocaleConvention"
    STYLE = "Style"
    OTHER = "Other"
    NO_EDIT = "NoEdit"


class ProviderKind(str, Enum):
    MT = "MT"
    LLM = "LLM"
    EMBEDDING = "Embedding"


@dataclass(frozen=True)
class Hypothesis:
    provider_id: str
    text: str
    teacher_score: float | None = None
    llm_score: float | None = None
    predicted_quality: float | None = None
    predicted_ter: float | None = None

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "text": self.text,
            "teacher_score": self.teacher_score,
            "llm_score": self.llm_score,
            "predicted_quality": self.predicted_quality,
            "predicted_ter": self.predicted_ter,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Hypothesis":
        return cls(
            provider_id=data["provider_id"],
            text=data["text"],
            teacher_score=data.get("teacher_score"),
            llm_score=data.get("llm_score"),
            predicted_quality=data.get("predicted_quality"),
            predicted_ter=data.get("predicted_ter"),
        )


@dataclass(frozen=True)
class Segment:
    id: str
    source_text: str
    source_lang: str
    target_lang: str
    hypotheses: tuple[Hypothesis, ...]
    status: SegmentStatus = SegmentStatus.PENDING
    topic: str | None = None

    def hypothesis_by_provider(self, provider_id: str) -> Hypothesis | None:
        for hyp in self.hypotheses:
            if hyp.provider_id == provider_id:
                return hyp
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source_text": self.source_text,
            "source_lang": self.source_lang,
            "target_lang": self.target_lang,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "status": self.status.value,
            "topic": self.topic,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Segment":
        return cls(
            id=data["id"],
            source_text=data["source_text"],
            source_lang=data["source_lang"],
            target_lang=data["target_lang"],
            hypotheses=tuple(Hypothesis.from_dict(h) for h in data["hypotheses"]),
            status=SegmentStatus(data.get("status", "Pending")),
            topic=data.get("topic"),
        )


@dataclass(frozen=True)
class Annotation:
    segment_id: str
    annotator_id: str
    chosen_provider_id: str
    error_categories: frozenset[ErrorCategory]
    post_edit_text: str | None = None
    is_pseudo: bool = False
    confidence: float | None = None
    timestamp: int = 0

    def to_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "annotator_id": self.annotator_id,
            "chosen_provider_id": self.chosen_provider_id,
            "error_categories": sorted(c.value for c in self.error_categories),
            "post_edit_text": self.post_edit_text,
            "is_pseudo": self.is_pseudo,
            "confidence": self.confidence,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Annotation":
        return cls(
            segment_id=data["segment_id"],
            annotator_id=data["annotator_id"],
            chosen_provider_id=data["chosen_provider_id"],
            error_categories=frozenset(
                ErrorCategory(c) for c in data["error_categories"]
            ),
            post_edit_text=data.get("post_edit_text"),
            is_pseudo=data.get("is_pseudo", False),
            confidence=data.get("confidence"),
            timestamp=data.get("timestamp", 0),
        )


@dataclass(frozen=True)
class Provider:
    id: str
    kind: ProviderKind
    endpoint: str
    display_name: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "endpoint": self.endpoint,
            "display_name": self.display_name,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Provider":
        return cls(
            id=data["id"],
            kind=ProviderKind(data["kind"]),
            endpoint=data["endpoint"],
            display_name=data["display_name"],
        )


@dataclass(frozen=True)
class ThresholdConfig:
    """Pseudo-label confidence threshold plus the priority weights
    (quality, ter, llm) which must be nonnegative and sum to 1."""

    tau: float = 0.9
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def validate(self) -> list[str]:
        violations = []
        if not 0.0 <= self.tau <= 1.0:
            violations.append(f"tau {self.tau} outside [0, 1]")
        if any(w < 0 for w in self.weights):
            violations.append(f"weights {self.weights} contain a negative entry")
        if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            violations.append(f"weights {self.weights} do not sum to 1")
        return violations

    def to_dict(self) -> dict:
        return {"tau": self.tau, "weights": list(self.weights)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "ThresholdConfig":
        return cls(tau=data["tau"], weights=tuple(data["weights"]))


# ---------------------------------------------------------------------------
# Validation and transitions
# ---------------------------------------------------------------------------


def _score_in_range(value: float | None, low: float, high: float) -> bool:
    return value is None or low <= value <= high


def validate_hypothesis(hyp: Hypothesis, known_providers: set[str] | None = None) -> list[str]:
    violations = []
    if not _score_in_range(hyp.teacher_score, 0.0, 100.0):
        violations.append(f"teacher_score {hyp.teacher_score} outside [0, 100]")
    if not _score_in_range(hyp.llm_score, 0.0, 100.0):
        violations.append(f"llm_score {hyp.llm_score} outside [0, 100]")
    if not _score_in_range(hyp.predicted_quality, 0.0, 100.0):
        violations.append(f"predicted_quality {hyp.predicted_quality} outside [0, 100]")
    if hyp.predicted_ter is not None and hyp.predicted_ter < 0:
        violations.append(f"predicted_ter {hyp.predicted_ter} must be >= 0")
    if known_providers is not None and hyp.provider_id not in known_providers:
        violations.append(f"provider_id {hyp.provider_id!r} is not registered")
    return violations


def validate_segment(
    seg: Segment, known_providers: set[str] | None = None
) -> list[str]:
    """Returns every violated invariant; empty list means the segment is valid."""
    violations = []
    if not seg.id:
        violations.append("id must be nonempty")
    if len(seg.hypotheses) < 1:
        violations.append("hypotheses < 1")
    if len(seg.hypotheses) > MAX_HYPOTHESES:
        violations.append(f"hypotheses > {MAX_HYPOTHESES}")
    seen = set()
    for hyp in seg.hypotheses:
        if hyp.provider_id in seen:
            violations.append(f"duplicate hypothesis provider {hyp.provider_id!r}")
        seen.add(hyp.provider_id)
        violations.extend(validate_hypothesis(hyp, known_providers))
    return violations


def validate_annotation(ann: Annotation, tau: float | None = None) -> list[str]:
    """Returns every violated invariant. ``tau`` is the confidence threshold
    active at labeling time; pass it to enforce the pseudo-label floor."""
    violations = []
    if ErrorCategory.NO_EDIT in ann.error_categories and len(ann.error_categories) > 1:
        violations.append("NoEdit exclusive")
    if ann.confidence is not None and not 0.0 <= ann.confidence <= 1.0:
        violations.append(f"confidence {ann.confidence} outside [0, 1]")
    if ann.is_pseudo:
        if ann.confidence is None:
            violations.append("pseudo annotation requires confidence")
        elif tau is not None and ann.confidence < tau:
            violations.append(
                f"pseudo confidence {ann.confidence} below active threshold {tau}"
            )
        if ann.annotator_id != "pseudo":
            violations.append('pseudo annotation must use annotator_id "pseudo"')
    return violations


def can_transition(from_status: SegmentStatus, to_status: SegmentStatus) -> bool:
    return _STATUS_RANK[to_status] > _STATUS_RANK[from_status]


def transition_status(seg: Segment, to: SegmentStatus) -> Segment:
    """New segment with the target status, or IllegalTransition if the move
    is backward or a self-loop."""
    if not can_transition(seg.status, to):
        raise IllegalTransition(seg.status.value, to.value)
    return replace(seg, status=to)


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def canonical_json(obj) -> str:
    """Stable byte representation: sorted keys, compact separators, UTF-8."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def segments_sorted(segments: Iterable[Segment]) -> list[Segment]:
    """Deterministic ordering: ties everywhere break lexicographically by id."""
    return sorted(segments, key=lambda s: s.id)
