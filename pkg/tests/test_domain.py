"""Domain model invariants, transitions, and serialization round-trips."""

import itertools

import pytest

from mtloop.domain import (
    Annotation,
    ErrorCategory,
    Hypothesis,
    Provider,
    ProviderKind,
    Segment,
    SegmentStatus,
    ThresholdConfig,
    can_transition,
    transition_status,
    validate_annotation,
    validate_segment,
)
from mtloop.errors import IllegalTransition


def make_segment(n_hypotheses=3, status=SegmentStatus.PENDING, seg_id="s1"):
    return Segment(
        id=seg_id,
        source_text="the quick brown fox",
        source_lang="en",
        target_lang="de",
        hypotheses=tuple(
            Hypothesis(provider_id=f"mt-{i}", text=f"hypothesis {i}")
            for i in range(n_hypotheses)
        ),
        status=status,
        topic="news",
    )


class TestValidateSegment:
    def test_valid_segment(self):
        assert validate_segment(make_segment(3)) == []

    def test_too_many_hypotheses(self):
        violations = validate_segment(make_segment(11))
        assert any("hypotheses > 10" in v for v in violations)

    def test_boundary_ten_is_fine(self):
        assert validate_segment(make_segment(10)) == []

    def test_no_hypotheses(self):
        violations = validate_segment(make_segment(0))
        assert any("hypotheses < 1" in v for v in violations)

    def test_score_ranges(self):
        seg = make_segment(1)
        bad = seg.hypotheses[0]
        seg = Segment(
            **{
                **{f: getattr(seg, f) for f in ("id", "source_text", "source_lang", "target_lang", "status", "topic")},
                "hypotheses": (
                    Hypothesis(
                        provider_id=bad.provider_id,
                        text=bad.text,
                        teacher_score=130.0,
                        predicted_ter=-0.5,
                    ),
                ),
            }
        )
        violations = validate_segment(seg)
        assert any("teacher_score" in v for v in violations)
        assert any("predicted_ter" in v for v in violations)

    def test_unregistered_provider(self):
        violations = validate_segment(make_segment(2), known_providers={"mt-0"})
        assert any("mt-1" in v for v in violations)

    def test_duplicate_provider(self):
        seg = make_segment(1)
        seg = Segment(
            id=seg.id,
            source_text=seg.source_text,
            source_lang=seg.source_lang,
            target_lang=seg.target_lang,
            hypotheses=(seg.hypotheses[0], seg.hypotheses[0]),
        )
        assert any("duplicate" in v for v in validate_segment(seg))


class TestValidateAnnotation:
    def test_no_edit_exclusive(self):
        ann = Annotation(
            segment_id="s1",
            annotator_id="alice",
            chosen_provider_id="mt-0",
            error_categories=frozenset({ErrorCategory.NO_EDIT, ErrorCategory.FLUENCY}),
        )
        assert any("NoEdit exclusive" in v for v in validate_annotation(ann))

    def test_no_edit_alone_ok(self):
        ann = Annotation(
            segment_id="s1",
            annotator_id="alice",
            chosen_provider_id="mt-0",
            error_categories=frozenset({ErrorCategory.NO_EDIT}),
        )
        assert validate_annotation(ann) == []

    def test_pseudo_requires_confidence(self):
        ann = Annotation(
            segment_id="s1",
            annotator_id="pseudo",
            chosen_provider_id="mt-0",
            error_categories=frozenset({ErrorCategory.NO_EDIT}),
            is_pseudo=True,
        )
        assert any("confidence" in v for v in validate_annotation(ann))

    def test_pseudo_below_threshold(self):
        ann = Annotation(
            segment_id="s1",
            annotator_id="pseudo",
            chosen_provider_id="mt-0",
            error_categories=frozenset({ErrorCategory.NO_EDIT}),
            is_pseudo=True,
            confidence=0.7,
        )
        assert validate_annotation(ann, tau=0.6) == []
        assert any("below" in v for v in validate_annotation(ann, tau=0.9))

    def test_confidence_range(self):
        ann = Annotation(
            segment_id="s1",
            annotator_id="alice",
            chosen_provider_id="mt-0",
            error_categories=frozenset(),
            confidence=1.7,
        )
        assert any("confidence" in v for v in validate_annotation(ann))


class TestStatusTransitions:
    def test_allowed_examples(self):
        seg = make_segment()
        prioritized = transition_status(seg, SegmentStatus.PRIORITIZED)
        assert prioritized.status is SegmentStatus.PRIORITIZED
        assert seg.status is SegmentStatus.PENDING  # original untouched
        promoted = transition_status(
            make_segment(status=SegmentStatus.AUTO_LABELED), SegmentStatus.HUMAN_LABELED
        )
        assert promoted.status is SegmentStatus.HUMAN_LABELED

    def test_reverse_forbidden(self):
        seg = make_segment(status=SegmentStatus.HUMAN_LABELED)
        with pytest.raises(IllegalTransition):
            transition_status(seg, SegmentStatus.AUTO_LABELED)

    def test_full_edge_enumeration(self):
        """All 16 ordered pairs: exactly the strictly-forward 6 are legal."""
        order = [
            SegmentStatus.PENDING,
            SegmentStatus.PRIORITIZED,
            SegmentStatus.AUTO_LABELED,
            SegmentStatus.HUMAN_LABELED,
        ]
        for i, j in itertools.product(range(4), repeat=2):
            expected = j > i
            assert can_transition(order[i], order[j]) is expected
            seg = make_segment(status=order[i])
            if expected:
                assert transition_status(seg, order[j]).status is order[j]
            else:
                with pytest.raises(IllegalTransition):
                    transition_status(seg, order[j])


class TestSerialization:
    def test_segment_round_trip(self):
        seg = Segment(
            id="s-42",
            source_text="café ☕",
            source_lang="fr",
            target_lang="ja",
            hypotheses=(
                Hypothesis("mt-0", "コーヒー", teacher_score=88.5, llm_score=90.0),
                Hypothesis("mt-1", "珈琲", predicted_quality=75.0, predicted_ter=0.4),
            ),
            status=SegmentStatus.PRIORITIZED,
            topic="food",
        )
        assert Segment.from_dict(seg.to_dict()) == seg

    def test_annotation_round_trip(self):
        ann = Annotation(
            segment_id="s-42",
            annotator_id="alice",
            chosen_provider_id="mt-1",
            error_categories=frozenset({ErrorCategory.ACCURACY, ErrorCategory.STYLE}),
            post_edit_text="better text",
            is_pseudo=False,
            confidence=None,
            timestamp=17,
        )
        assert Annotation.from_dict(ann.to_dict()) == ann

    def test_provider_round_trip(self):
        provider = Provider(
            id="mt-0", kind=ProviderKind.MT, endpoint="mock:table", display_name="Mock MT"
        )
        assert Provider.from_dict(provider.to_dict()) == provider

    def test_threshold_config_round_trip(self):
        cfg = ThresholdConfig(tau=0.75, weights=(0.5, 0.25, 0.25))
        assert ThresholdConfig.from_dict(cfg.to_dict()) == cfg

    def test_enum_wire_names_exact(self):
        assert [c.value for c in ErrorCategory] == [
            "Accuracy",
            "Fluency",
            "Terminology",
            "LocaleConvention",
            "Style",
            "Other",
            "NoEdit",
        ]
        assert [s.value for s in SegmentStatus] == [
            "Pending",
            "Prioritized",
            "AutoLabeled",
            "HumanLabeled",
        ]


class TestThresholdConfig:
    def test_valid(self):
        assert ThresholdConfig(tau=0.5, weights=(0.2, 0.3, 0.5)).validate() == []

    def test_tau_out_of_range(self):
        assert any("tau" in v for v in ThresholdConfig(tau=1.5).validate())

    def test_weights_must_sum_to_one(self):
        assert any(
            "sum" in v for v in ThresholdConfig(weights=(0.5, 0.5, 0.2)).validate()
        )

    def test_negative_weight(self):
        assert any(
            "negative" in v
            for v in ThresholdConfig(weights=(-0.2, 0.6, 0.6)).validate()
        )
