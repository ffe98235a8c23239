"""Application service: the single writer that mediates every mutation.

All durable writes go through the event log; in-memory extras (leases and
the Prioritized status marker) are deliberately ephemeral because they are
wall-clock-bound, so replaying a log reconstructs identical admin
statistics. Feature vectors feeding the learner pass through a fixed
per-feature scaling so raw surface counts (which reach the hundreds) keep
online gradient steps well-conditioned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from . import learner as qe
from .domain import (
    Annotation,
    ErrorCategory,
    Hypothesis,
    Provider,
    Segment,
    SegmentStatus,
    ThresholdConfig,
    transition_status,
    validate_annotation,
    validate_segment,
)
from .errors import (
    DegenerateInput,
    LeaseExpired,
    OutOfRange,
    PoolEmpty,
    StaleSegment,
    UnknownAnnotator,
    ValidationFailure,
)
from .features import FeatureVector, extract_surface
from .metrics import CorrelationReport, correlations, ter_text
from .providers import LlmJudge
from .scheduler import (
    SchedulingItem,
    SegmentFeatures,
    Strategy,
    next_batch,
    pseudo_label_pass,
)
from .store import (
    EventKind,
    EventSink,
    ProjectState,
    apply_event,
    replay,
)

# Divisors bringing surface features to O(1) for the linear learner. Applied
# identically at train and predict time; ratios and TTR are already O(1).
DEFAULT_FEATURE_SCALES: dict[str, float] = {
    "src_token_count": 10.0,
    "src_char_count": 50.0,
    "src_mean_token_len": 5.0,
    "src_punct_count": 5.0,
    "src_digit_count": 5.0,
    "hyp_token_count": 10.0,
    "hyp_char_count": 50.0,
    "hyp_mean_token_len": 5.0,
    "hyp_punct_count": 5.0,
    "hyp_digit_count": 5.0,
    "abs_char_delta": 25.0,
}


def scale_features(fv: FeatureVector, scales: Mapping[str, float]) -> FeatureVector:
    values = tuple(
        v / scales[name] if name in scales else v
        for name, v in zip(fv.names, fv.values)
    )
    return FeatureVector(values=values, names=fv.names, schema_version=fv.schema_version)


@dataclass
class ServiceConfig:
    lease_ttl_seconds: float = 900.0
    batch_size: int = 1
    hyperparams: qe.Hyperparams = field(default_factory=lambda: qe.Hyperparams(0.05, 1e-4))
    annotators: tuple[str, ...] = ()  # empty tuple = any id accepted
    auth_token: str | None = None
    feature_scales: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_FEATURE_SCALES)
    )


@dataclass(frozen=True)
class Lease:
    segment_id: str
    annotator_id: str
    expires_at: float


@dataclass(frozen=True)
class AnnotationReceipt:
    improvement_pct: float
    resolved_categories: frozenset[ErrorCategory]
    remaining_categories: frozenset[ErrorCategory]
    new_model_version: int

    def to_dict(self) -> dict:
        return {
            "improvement_pct": self.improvement_pct,
            "resolved_categories": sorted(c.value for c in self.resolved_categories),
            "remaining_categories": sorted(c.value for c in self.remaining_categories),
            "new_model_version": self.new_model_version,
        }


@dataclass(frozen=True)
class AdminStats:
    rated_count: int
    pending_count: int
    auto_labeled_count: int
    fraction_auto_labelable: float
    per_provider: dict[str, dict]
    per_annotator: dict[str, dict]
    correlation: CorrelationReport | None
    topk: dict[str, dict[str, float]] | None

    def to_dict(self) -> dict:
        return {
            "rated_count": self.rated_count,
            "pending_count": self.pending_count,
            "auto_labeled_count": self.auto_labeled_count,
            "fraction_auto_labelable": self.fraction_auto_labelable,
            "per_provider": self.per_provider,
            "per_annotator": self.per_annotator,
            "correlation": self.correlation.to_json_dict() if self.correlation else None,
            "topk": self.topk,
        }


_UNLABELED = (SegmentStatus.PENDING, SegmentStatus.PRIORITIZED)


class AnnotationService:
    """Single-writer loop over an event log plus ephemeral lease state."""

    def __init__(
        self,
        log: EventSink,
        judge: LlmJudge,
        config: ServiceConfig | None = None,
        clock: Callable[[], float] = time.time,
        providers: Sequence[Provider] = (),
    ):
        self._log = log
        self._judge = judge
        self.config = config or ServiceConfig()
        self._clock = clock
        self.providers: dict[str, Provider] = {p.id: p for p in providers}
        self.state: ProjectState = replay(log.read_all())
        self._leases: dict[str, Lease] = {}
        self._fv_cache: dict[str, tuple[FeatureVector, ...]] = {}
        self._matrix_cache: dict[str, np.ndarray] = {}

    # -- internals ---------------------------------------------------------

    def _append(self, kind: EventKind, payload: dict) -> None:
        event = self._log.append(kind, payload)
        self.state = apply_event(self.state, event)

    def _features_for(self, seg: Segment) -> tuple[FeatureVector, ...]:
        cached = self._fv_cache.get(seg.id)
        if cached is not None and len(cached) == len(seg.hypotheses):
            return cached
        fvs = tuple(
            scale_features(
                extract_surface(seg.source_text, hyp.text), self.config.feature_scales
            )
            for hyp in seg.hypotheses
        )
        self._fv_cache[seg.id] = fvs
        return fvs

    def _segment_matrix(self, seg: Segment) -> np.ndarray:
        """(n_hypotheses, dim+1) scaled feature matrix with bias column."""
        cached = self._matrix_cache.get(seg.id)
        if cached is not None and cached.shape[0] == len(seg.hypotheses):
            return cached
        fvs = self._features_for(seg)
        matrix = np.stack(
            [np.append(np.asarray(fv.values, dtype=np.float64), 1.0) for fv in fvs]
        )
        self._matrix_cache[seg.id] = matrix
        return matrix

    def _model(self, fvs: Sequence[FeatureVector]) -> qe.ModelState:
        if self.state.model is not None:
            return self.state.model
        return qe.fresh_state(
            len(fvs[0]), fvs[0].schema_version, self.config.hyperparams
        )

    def _prune_leases(self) -> None:
        now = self._clock()
        self._leases = {
            sid: lease for sid, lease in self._leases.items() if lease.expires_at > now
        }

    def _unlabeled_segments(self) -> list[Segment]:
        return sorted(
            (s for s in self.state.segments.values() if s.status in _UNLABELED),
            key=lambda s: s.id,
        )

    def _scheduling_items(self, segments: Sequence[Segment]) -> list[SchedulingItem]:
        """Model estimates for each segment's ranker-top hypothesis, batched
        by hypothesis count so large pools stay cheap."""
        if not segments:
            return []
        model = self._model(self._features_for(segments[0]))
        w_rank = np.asarray(model.ranker_weights, dtype=np.float64)
        w_reg = np.asarray(model.regressor_weights, dtype=np.float64)
        w_ter = np.asarray(model.ter_weights, dtype=np.float64)

        groups: dict[int, list[int]] = {}
        matrices = []
        for idx, seg in enumerate(segments):
            matrix = self._segment_matrix(seg)
            matrices.append(matrix)
            groups.setdefault(matrix.shape[0], []).append(idx)

        quality = np.empty(len(segments))
        ter_estimate = np.empty(len(segments))
        margin = np.empty(len(segments))
        for n_hyp, idxs in groups.items():
            block = np.stack([matrices[i] for i in idxs])  # (g, n_hyp, d+1)
            scores = block @ w_rank
            shifted = scores - scores.max(axis=1, keepdims=True)
            exp = np.exp(shifted)
            probs = exp / exp.sum(axis=1, keepdims=True)
            order = np.argsort(-probs, axis=1, kind="stable")
            sorted_probs = np.take_along_axis(probs, order, axis=1)
            top = order[:, 0]
            rows = np.arange(len(idxs))
            top_features = block[rows, top]
            quality[idxs] = np.clip(
                qe.QUALITY_SCALE * (top_features @ w_reg), 0.0, 100.0
            )
            ter_estimate[idxs] = np.maximum(top_features @ w_ter, 0.0)
            margin[idxs] = (
                sorted_probs[:, 0] - sorted_probs[:, 1] if n_hyp > 1 else 1.0
            )

        items = []
        for idx, seg in enumerate(segments):
            llm_scores = [h.llm_score for h in seg.hypotheses if h.llm_score is not None]
            items.append(
                SchedulingItem(
                    segment_id=seg.id,
                    predicted_quality=float(quality[idx]),
                    predicted_ter=float(ter_estimate[idx]),
                    llm_score=max(llm_scores) if llm_scores else None,
                    margin=float(margin[idx]),
                )
            )
        return items

    def preview_fraction_auto(self) -> float:
        """Fraction of the pending pool the current model clears at tau."""
        pool = self._unlabeled_segments()
        if not pool:
            return 0.0
        model = self._model(self._features_for(pool[0]))
        w_rank = np.asarray(model.ranker_weights, dtype=np.float64)
        confident = 0
        for seg in pool:
            scores = self._segment_matrix(seg) @ w_rank
            shifted = scores - scores.max()
            exp = np.exp(shifted)
            if exp.max() / exp.sum() >= self.state.config.tau:
                confident += 1
        return confident / len(pool)

    # -- ingestion ---------------------------------------------------------

    def ingest_segment(self, segment: Segment) -> None:
        violations = validate_segment(segment)
        if segment.id in self.state.segments:
            violations.append(f"duplicate segment id {segment.id!r}")
        if violations:
            raise ValidationFailure(violations)
        self._append(EventKind.SEGMENT_INGESTED, {"segment": segment.to_dict()})

    def attach_hypothesis(self, segment_id: str, hypothesis: Hypothesis) -> None:
        seg = self.state.segments.get(segment_id)
        if seg is None:
            raise StaleSegment(f"unknown segment {segment_id!r}")
        candidate = replace(seg, hypotheses=seg.hypotheses + (hypothesis,))
        violations = validate_segment(candidate)
        if violations:
            raise ValidationFailure(violations)
        self._fv_cache.pop(segment_id, None)
        self._matrix_cache.pop(segment_id, None)
        self._append(
            EventKind.HYPOTHESIS_ATTACHED,
            {"segment_id": segment_id, "hypothesis": hypothesis.to_dict()},
        )

    def attach_scores(self, segment_id: str, provider_id: str, **scores: float) -> None:
        seg = self.state.segments.get(segment_id)
        if seg is None or seg.hypothesis_by_provider(provider_id) is None:
            raise StaleSegment(f"no hypothesis {provider_id!r} on {segment_id!r}")
        self._append(
            EventKind.SCORES_ATTACHED,
            {"segment_id": segment_id, "provider_id": provider_id, **scores},
        )

    def score_with_judge(self, segment_id: str) -> None:
        """Attach LLM direct-assessment scores to every hypothesis."""
        seg = self.state.segments[segment_id]
        for hyp in seg.hypotheses:
            score = self._judge.direct_assessment(
                seg.source_text, hyp.text, seg.source_lang, seg.target_lang
            )
            self.attach_scores(segment_id, hyp.provider_id, llm_score=score)

    # -- annotator workflow -------------------------------------------------

    def _lease(self, segment_id: str, annotator_id: str) -> tuple[Segment, float]:
        seg = self.state.segments[segment_id]
        if seg.status is SegmentStatus.PENDING:
            seg = transition_status(seg, SegmentStatus.PRIORITIZED)
            self.state = replace(
                self.state, segments={**self.state.segments, seg.id: seg}
            )
        expires = self._clock() + self.config.lease_ttl_seconds
        self._leases[seg.id] = Lease(seg.id, annotator_id, expires)
        return seg, expires

    def lease_specific(self, segment_id: str, annotator_id: str) -> Segment:
        """Lease a chosen segment, bypassing the scheduler: used by the
        simulation harness for baseline sampling and by verification flows
        that promote auto-labeled segments."""
        self._prune_leases()
        seg = self.state.segments.get(segment_id)
        leasable = seg is not None and seg.status is not SegmentStatus.HUMAN_LABELED
        if not leasable or segment_id in self._leases:
            raise StaleSegment(f"segment {segment_id!r} is not leasable")
        leased, _ = self._lease(segment_id, annotator_id)
        return leased

    def get_next_sample(
        self, annotator_id: str, strategy: Strategy = Strategy.TRIPARTITE
    ) -> dict:
        if annotator_id == "pseudo" or (
            self.config.annotators and annotator_id not in self.config.annotators
        ):
            raise UnknownAnnotator(f"annotator {annotator_id!r} is not registered")
        self._prune_leases()
        pool = [
            seg for seg in self._unlabeled_segments() if seg.id not in self._leases
        ]
        if not pool:
            raise PoolEmpty("no unlabeled segments available")
        items = self._scheduling_items(pool)
        head = next_batch(items, self.state.config, 1, strategy)[0]
        item = next(i for i in items if i.segment_id == head)
        seg, expires = self._lease(head, annotator_id)

        fvs = self._features_for(seg)
        model = self._model(fvs)
        predictions = qe.predict_segment(model, fvs)
        return {
            "segment": seg.to_dict(),
            "predictions": [
                {
                    "provider_id": hyp.provider_id,
                    "quality": p.quality,
                    "ter_estimate": p.ter_estimate,
                    "confidence": p.confidence,
                    "model_version": p.model_version,
                }
                for hyp, p in zip(seg.hypotheses, predictions)
            ],
            "llm": {"max_llm_score": item.llm_score},
            "lease_expires_at": expires,
        }

    def submit_annotation(self, annotation: Annotation) -> AnnotationReceipt:
        self._prune_leases()
        lease = self._leases.get(annotation.segment_id)
        if lease is None or lease.annotator_id != annotation.annotator_id:
            raise LeaseExpired(
                f"segment {annotation.segment_id!r} is not leased to "
                f"{annotation.annotator_id!r}"
            )
        seg = self.state.segments.get(annotation.segment_id)
        if seg is None or seg.status is SegmentStatus.HUMAN_LABELED:
            raise StaleSegment(f"segment {annotation.segment_id!r} is not annotatable")
        violations = validate_annotation(annotation)
        if annotation.is_pseudo:
            violations.append("human submissions cannot be pseudo labels")
        chosen = seg.hypothesis_by_provider(annotation.chosen_provider_id)
        if chosen is None:
            violations.append(
                f"chosen provider {annotation.chosen_provider_id!r} has no hypothesis"
            )
        if violations:
            raise ValidationFailure(violations)

        post_edit = annotation.post_edit_text or chosen.text
        analysis = self._judge.analyze(
            seg.source_text, chosen.text, post_edit, annotation.error_categories
        )
        score_after = self._judge.direct_assessment(
            seg.source_text, post_edit, seg.source_lang, seg.target_lang
        )
        score_before = (
            chosen.llm_score if chosen.llm_score is not None else chosen.teacher_score
        )
        improvement_pct = (
            100.0 * (score_after - score_before) / score_before
            if score_before is not None and score_before > 0
            else 0.0
        )

        self._append(
            EventKind.ANNOTATION_SUBMITTED, {"annotation": annotation.to_dict()}
        )

        fvs = self._features_for(seg)
        model = self._model(fvs)
        chosen_index = next(
            i
            for i, hyp in enumerate(seg.hypotheses)
            if hyp.provider_id == annotation.chosen_provider_id
        )
        model = qe.update_ranker(model, fvs, chosen_index)
        for fv, hyp in zip(fvs, seg.hypotheses):
            if hyp.teacher_score is not None:
                model = qe.update_regressor(model, fv, hyp.teacher_score)
        observed_ter = ter_text(chosen.text, post_edit) if post_edit.strip() else None
        if observed_ter is not None:
            model = qe.update_ter(model, fvs[chosen_index], observed_ter)
        self._append(EventKind.MODEL_UPDATED, {"model": model.to_dict()})

        del self._leases[annotation.segment_id]
        return AnnotationReceipt(
            improvement_pct=improvement_pct,
            resolved_categories=analysis.resolved_categories,
            remaining_categories=analysis.remaining_categories,
            new_model_version=model.version,
        )

    # -- admin workflow ------------------------------------------------------

    def admin_set_threshold(self, tau: float) -> None:
        if not 0.0 <= tau <= 1.0:
            raise OutOfRange(f"tau {tau} outside [0, 1]")
        self._append(EventKind.THRESHOLD_CHANGED, {"tau": tau})

    def admin_set_weights(self, weights: Sequence[float]) -> None:
        if len(weights) != 3:
            raise OutOfRange(f"need 3 weights, got {len(weights)}")
        candidate = ThresholdConfig(weights=tuple(weights))
        problems = [v for v in candidate.validate() if "weights" in v]
        if problems:
            raise OutOfRange("; ".join(problems))
        self._append(EventKind.WEIGHTS_CHANGED, {"weights": list(weights)})

    def _pending_pool_features(self) -> list[SegmentFeatures]:
        return [
            SegmentFeatures(segment=seg, features=self._features_for(seg))
            for seg in self._unlabeled_segments()
        ]

    def admin_auto_label(self) -> dict:
        pool = self._pending_pool_features()
        if not pool:
            return {"labeled_count": 0, "fraction_auto": 0.0}
        model = self._model(pool[0].features)
        annotations, fraction = pseudo_label_pass(pool, model, self.state.config)
        for ann in annotations:
            self._append(EventKind.PSEUDO_LABELED, {"annotation": ann.to_dict()})
            self._leases.pop(ann.segment_id, None)
        return {"labeled_count": len(annotations), "fraction_auto": fraction}

    def get_admin_stats(self) -> AdminStats:
        return compute_admin_stats(self.state, self.config.feature_scales)

    def get_segment_histograms(self, rated: bool) -> dict:
        labeled = (SegmentStatus.AUTO_LABELED, SegmentStatus.HUMAN_LABELED)
        segments = [
            s
            for s in sorted(self.state.segments.values(), key=lambda s: s.id)
            if (s.status in labeled) == rated
        ]
        length_hist: dict[str, int] = {}
        topic_hist: dict[str, int] = {}
        for seg in segments:
            bucket_lo = (len(seg.source_text) // 10) * 10
            bucket = f"{bucket_lo}-{bucket_lo + 9}"
            length_hist[bucket] = length_hist.get(bucket, 0) + 1
            topic = seg.topic or "untagged"
            topic_hist[topic] = topic_hist.get(topic, 0) + 1
        return {
            "count": len(segments),
            "length_histogram": dict(sorted(length_hist.items(), key=_bucket_key)),
            "topic_histogram": dict(sorted(topic_hist.items())),
        }

    def get_annotators(self) -> dict:
        stats = self.get_admin_stats()
        return {"annotators": stats.per_annotator}


def _bucket_key(item: tuple[str, int]) -> int:
    return int(item[0].split("-")[0])


# ---------------------------------------------------------------------------
# Statistics as a pure function of project state
# ---------------------------------------------------------------------------


def compute_admin_stats(
    state: ProjectState, feature_scales: Mapping[str, float] | None = None
) -> AdminStats:
    """Deterministic aggregation over a project state; replaying a log and
    aggregating yields byte-identical results."""
    scales = feature_scales if feature_scales is not None else DEFAULT_FEATURE_SCALES
    segments = state.segments
    rated = [
        s for s in segments.values() if s.status is SegmentStatus.HUMAN_LABELED
    ]
    pending = [s for s in segments.values() if s.status in _UNLABELED]
    auto = [s for s in segments.values() if s.status is SegmentStatus.AUTO_LABELED]

    human_latest: dict[str, Annotation] = {}
    for ann in state.annotations:
        if not ann.is_pseudo:
            human_latest[ann.segment_id] = ann

    per_provider: dict[str, dict] = {}
    for seg in segments.values():
        for hyp in seg.hypotheses:
            per_provider.setdefault(
                hyp.provider_id,
                {"wins": 0, "no_edit_count": 0, "error_category_histogram": {}},
            )
    per_annotator: dict[str, dict] = {}
    for ann in sorted(state.annotations, key=lambda a: a.timestamp):
        slot = per_annotator.setdefault(
            ann.annotator_id, {"count": 0, "category_histogram": {}}
        )
        slot["count"] += 1
        for cat in sorted(c.value for c in ann.error_categories):
            slot["category_histogram"][cat] = slot["category_histogram"].get(cat, 0) + 1
    for ann in human_latest.values():
        entry = per_provider.setdefault(
            ann.chosen_provider_id,
            {"wins": 0, "no_edit_count": 0, "error_category_histogram": {}},
        )
        entry["wins"] += 1
        if ErrorCategory.NO_EDIT in ann.error_categories:
            entry["no_edit_count"] += 1
        for cat in sorted(c.value for c in ann.error_categories):
            entry["error_category_histogram"][cat] = (
                entry["error_category_histogram"].get(cat, 0) + 1
            )
    per_provider = {
        pid: {
            "wins": entry["wins"],
            "no_edit_count": entry["no_edit_count"],
            "error_category_histogram": dict(
                sorted(entry["error_category_histogram"].items())
            ),
        }
        for pid, entry in sorted(per_provider.items())
    }
    per_annotator = {
        aid: {
            "count": entry["count"],
            "category_histogram": dict(sorted(entry["category_histogram"].items())),
        }
        for aid, entry in sorted(per_annotator.items())
    }

    # correlation between teacher and LLM assessments over doubly-scored
    # hypotheses, in deterministic segment/hypothesis order
    teacher_scores: list[float] = []
    llm_scores: list[float] = []
    for seg in sorted(segments.values(), key=lambda s: s.id):
        for hyp in seg.hypotheses:
            if hyp.teacher_score is not None and hyp.llm_score is not None:
                teacher_scores.append(hyp.teacher_score)
                llm_scores.append(hyp.llm_score)
    correlation: CorrelationReport | None = None
    if len(teacher_scores) >= 2:
        try:
            correlation = correlations(teacher_scores, llm_scores)
        except DegenerateInput:
            correlation = None

    # fraction of the pending pool the current model would auto-label
    fraction_auto = 0.0
    if pending:
        pool_fvs = [
            (
                seg,
                tuple(
                    scale_features(extract_surface(seg.source_text, h.text), scales)
                    for h in seg.hypotheses
                ),
            )
            for seg in sorted(pending, key=lambda s: s.id)
        ]
        model = state.model or qe.fresh_state(
            len(pool_fvs[0][1][0]), pool_fvs[0][1][0].schema_version
        )
        confident = sum(
            1
            for _, fvs in pool_fvs
            if qe.rank_best(model, fvs).confidence >= state.config.tau
        )
        fraction_auto = confident / len(pending)

    topk = _topk_stats(state, scales)

    return AdminStats(
        rated_count=len(rated),
        pending_count=len(pending),
        auto_labeled_count=len(auto),
        fraction_auto_labelable=fraction_auto,
        per_provider=per_provider,
        per_annotator=per_annotator,
        correlation=correlation,
        topk=topk,
    )


def _topk_stats(
    state: ProjectState, scales: Mapping[str, float]
) -> dict[str, dict[str, float]] | None:
    human_latest: dict[str, Annotation] = {}
    for ann in state.annotations:
        if not ann.is_pseudo:
            human_latest[ann.segment_id] = ann
    if not human_latest:
        return None

    llm_hits = {1: 0, 3: 0}
    llm_total = 0
    ranker_hits = {1: 0, 3: 0}
    ranker_total = 0
    for sid in sorted(human_latest):
        seg = state.segments.get(sid)
        if seg is None or not seg.hypotheses:
            continue
        truth = human_latest[sid].chosen_provider_id

        scored = [h for h in seg.hypotheses if h.llm_score is not None]
        if scored:
            by_score = sorted(
                range(len(seg.hypotheses)),
                key=lambda i: (
                    -(
                        seg.hypotheses[i].llm_score
                        if seg.hypotheses[i].llm_score is not None
                        else float("-inf")
                    ),
                    i,
                ),
            )
            llm_ranking = [seg.hypotheses[i].provider_id for i in by_score]
            llm_total += 1
            for k in (1, 3):
                if truth in llm_ranking[: min(k, len(llm_ranking))]:
                    llm_hits[k] += 1

        fvs = tuple(
            scale_features(extract_surface(seg.source_text, h.text), scales)
            for h in seg.hypotheses
        )
        model = state.model or qe.fresh_state(len(fvs[0]), fvs[0].schema_version)
        order = qe.rank_best(model, fvs).order
        ranker_ranking = [seg.hypotheses[i].provider_id for i in order]
        ranker_total += 1
        for k in (1, 3):
            if truth in ranker_ranking[: min(k, len(ranker_ranking))]:
                ranker_hits[k] += 1

    result: dict[str, dict[str, float]] = {}
    if llm_total:
        result["llm"] = {"top1": llm_hits[1] / llm_total, "top3": llm_hits[3] / llm_total}
    if ranker_total:
        result["ranker"] = {
            "top1": ranker_hits[1] / ranker_total,
            "top3": ranker_hits[3] / ranker_total,
        }
    return result or None
