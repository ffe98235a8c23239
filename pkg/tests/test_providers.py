"""Prompt rendering goldens, reply parsing, mock judges, and MT transport."""

import pytest

from mtloop.domain import ErrorCategory, Hypothesis, Provider, ProviderKind
from mtloop.errors import (
    IndexParseFailure,
    MalformedResponse,
    ProviderError,
    ProviderTimeout,
    UnparseableScore,
)
from mtloop.providers import (
    ANALYZE_ANNOTATION_V1,
    DIRECT_ASSESS_V1,
    LLM_ENSEMBLE_PROVIDER_ID,
    RECOMMEND_V1,
    SYNTHESIZE_V1,
    HttpMtClient,
    HttpProviderClient,
    LlmAnalysis,
    MockLlmJudge,
    MockMtClient,
    PromptLlmJudge,
    RetryPolicy,
    analyze_annotation,
    numbered_candidates,
    parse_analysis,
    parse_category,
    parse_da_score,
    parse_recommendation,
    parse_single_segment,
    provider_api_key,
    recommend_best,
    score_direct_assessment,
    synthesize_translation,
    translate,
)

HYPS = (
    Hypothesis("mt-0", "der schnelle braune fuchs"),
    Hypothesis("mt-1", "der flinke braune fuchs"),
    Hypothesis("mt-2", "schneller brauner fuchs"),
)


class TestPromptGoldens:
    """Rendered prompts are frozen per template version."""

    def test_synthesize_rendering(self):
        prompt = SYNTHESIZE_V1.render(
            source="the quick brown fox",
            source_lang="en",
            target_lang="de",
            candidates=numbered_candidates([h.text for h in HYPS]),
        )
        assert prompt == (
            "You are an expert translator merging candidate translations.\n"
            "Source (en): the quick brown fox\n"
            "Candidate translations (de):\n"
            "1. der schnelle braune fuchs\n"
            "2. der flinke braune fuchs\n"
            "3. schneller brauner fuchs\n"
            "Reply with exactly one line: the single best translation, "
            "combining the candidates' strengths. No commentary."
        )
        for hyp in HYPS:
            assert prompt.count(hyp.text) == 1

    def test_direct_assess_rendering(self):
        prompt = DIRECT_ASSESS_V1.render(
            source="hello", source_lang="en", target_lang="fr", hypothesis="bonjour"
        )
        assert prompt == (
            "Rate the translation quality on a scale from 0 (useless) to 100 (perfect).\n"
            "Source (en): hello\n"
            "Translation (fr): bonjour\n"
            'Reply with the score first, e.g. "Score: 87". '
            "One line of justification may follow."
        )

    def test_recommend_rendering(self):
        prompt = RECOMMEND_V1.render(
            source="hello",
            candidates=numbered_candidates(["salut", "bonjour"]),
            n="2",
        )
        assert prompt == (
            "Pick the best translation of the source.\n"
            "Source: hello\n"
            "Candidates:\n"
            "1. salut\n"
            "2. bonjour\n"
            "Reply with the candidate number (1-2) first, then a short reason."
        )

    def test_analyze_rendering_includes_categories(self):
        prompt = ANALYZE_ANNOTATION_V1.render(
            source="hello",
            original="salu",
            post_edit="salut",
            prior_categories="Accuracy, Fluency",
        )
        assert "Error categories previously marked: Accuracy, Fluency" in prompt

    def test_missing_placeholder_rejected(self):
        with pytest.raises(ValueError):
            DIRECT_ASSESS_V1.render(source="hello")

    def test_template_versions_pinned(self):
        assert SYNTHESIZE_V1.version == 1
        assert DIRECT_ASSESS_V1.version == 1
        assert ANALYZE_ANNOTATION_V1.version == 1
        assert RECOMMEND_V1.version == 1


class TestParsers:
    def test_score_with_prefix(self):
        assert parse_da_score("Score: 87.") == 87.0

    def test_score_clamped(self):
        assert parse_da_score("150 out of 100!") == 100.0
        assert parse_da_score("-20") == 0.0

    def test_score_decimal(self):
        assert parse_da_score("I'd say 73.5 overall") == 73.5

    def test_unparseable_score(self):
        with pytest.raises(UnparseableScore):
            parse_da_score("no number here")

    def test_parser_never_crashes_on_arbitrary_text(self):
        from hypothesis import given, settings
        from hypothesis import strategies as st

        @settings(max_examples=200, deadline=None)
        @given(st.text(max_size=200))
        def run(reply):
            try:
                score = parse_da_score(reply)
                assert 0.0 <= score <= 100.0
            except UnparseableScore:
                pass

        run()

    def test_recommendation_with_rationale(self):
        index, rationale = parse_recommendation("2 — more fluent", 3)
        assert index == 2
        assert rationale == "more fluent"

    def test_recommendation_bare_index(self):
        assert parse_recommendation("1", 3) == (1, "")

    def test_recommendation_out_of_range(self):
        with pytest.raises(IndexParseFailure):
            parse_recommendation("7", 3)

    def test_recommendation_no_index(self):
        with pytest.raises(IndexParseFailure):
            parse_recommendation("the second one", 3)

    def test_category_fallback_to_other(self):
        assert parse_category("Register") is ErrorCategory.OTHER
        assert parse_category("accuracy") is ErrorCategory.ACCURACY
        assert parse_category("locale convention") is ErrorCategory.LOCALE_CONVENTION

    def test_analysis_structured_reply(self):
        analysis = parse_analysis(
            "Score: 92\nResolved: Accuracy, Fluency\nRemaining: Terminology\n"
            "Good edit overall."
        )
        assert analysis.score_after == 92.0
        assert analysis.resolved_categories == frozenset(
            {ErrorCategory.ACCURACY, ErrorCategory.FLUENCY}
        )
        assert analysis.remaining_categories == frozenset({ErrorCategory.TERMINOLOGY})
        assert analysis.feedback_text == "Good edit overall."

    def test_analysis_overlap_counts_as_remaining(self):
        analysis = parse_analysis("Score: 70\nResolved: Accuracy\nRemaining: Accuracy")
        assert analysis.resolved_categories == frozenset()
        assert analysis.remaining_categories == frozenset({ErrorCategory.ACCURACY})

    def test_analysis_requires_score(self):
        with pytest.raises(MalformedResponse):
            parse_analysis("Resolved: Accuracy\nall good")

    def test_analysis_none_lists(self):
        analysis = parse_analysis("Score: 88\nResolved: none\nRemaining: none")
        assert analysis.resolved_categories == frozenset()
        assert analysis.remaining_categories == frozenset()

    def test_single_segment_guard(self):
        assert parse_single_segment("  une seule ligne \n") == "une seule ligne"
        with pytest.raises(MalformedResponse):
            parse_single_segment("two\nlines")
        with pytest.raises(MalformedResponse):
            parse_single_segment("   ")

    def test_llm_analysis_disjointness_enforced(self):
        with pytest.raises(ValueError):
            LlmAnalysis(
                resolved_categories=frozenset({ErrorCategory.STYLE}),
                remaining_categories=frozenset({ErrorCategory.STYLE}),
                feedback_text="",
                score_after=50.0,
            )


class TestMockJudge:
    REFS = {"the quick brown fox": "der schnelle braune fuchs"}

    def judge(self):
        return MockLlmJudge(self.REFS)

    def test_da_identity_on_reference(self):
        score = self.judge().direct_assessment(
            "the quick brown fox", "der schnelle braune fuchs", "en", "de"
        )
        assert score == 100.0

    def test_da_total_mismatch_is_zero(self):
        judge = MockLlmJudge({"a b c": "x y z"})
        assert judge.direct_assessment("a b c", "p q r", "en", "de") == 0.0

    def test_synthesize_echoes_best(self):
        result = synthesize_translation(
            self.judge(), "the quick brown fox", list(HYPS), "en", "de"
        )
        assert result.text == "der schnelle braune fuchs"
        assert result.provider_id == LLM_ENSEMBLE_PROVIDER_ID

    def test_synthesize_single_hypothesis_identity(self):
        result = synthesize_translation(
            self.judge(), "the quick brown fox", [HYPS[1]], "en", "de"
        )
        assert result.text == HYPS[1].text

    def test_recommend_picks_argmax(self):
        provider_id, rationale = recommend_best(
            self.judge(), "the quick brown fox", list(HYPS)
        )
        assert provider_id == "mt-0"
        assert rationale

    def test_analyze_no_change(self):
        analysis = analyze_annotation(
            self.judge(),
            "the quick brown fox",
            HYPS[1].text,
            HYPS[1].text,
            frozenset({ErrorCategory.FLUENCY}),
        )
        assert analysis.resolved_categories == frozenset()
        assert analysis.remaining_categories == frozenset({ErrorCategory.FLUENCY})

    def test_analyze_perfect_fix(self):
        prior = frozenset({ErrorCategory.ACCURACY, ErrorCategory.STYLE})
        analysis = analyze_annotation(
            self.judge(),
            "the quick brown fox",
            "der flinke fuchs",
            "der schnelle braune fuchs",
            prior,
        )
        assert analysis.resolved_categories == prior
        assert analysis.remaining_categories == frozenset()
        assert analysis.score_after == 100.0

    def test_unknown_source_neutral(self):
        assert self.judge().direct_assessment("unseen", "text", "en", "de") == 50.0

    def test_determinism(self):
        judge = self.judge()
        first = judge.direct_assessment("the quick brown fox", "der fuchs", "en", "de")
        second = judge.direct_assessment("the quick brown fox", "der fuchs", "en", "de")
        assert first == second


class FakeTransport:
    """Scripted (status, body) responses; records calls and sleeps."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.calls = []
        self.sleeps = []

    def post(self, url, payload, timeout):
        self.calls.append((url, payload))
        reply = self.replies.pop(0)
        if reply == "timeout":
            raise ProviderTimeout("scripted timeout")
        return reply

    def sleep(self, seconds):
        self.sleeps.append(seconds)


def make_client(replies, provider_id="mt-x"):
    provider = Provider(
        id=provider_id, kind=ProviderKind.MT, endpoint="http://unit.test/translate",
        display_name="fake",
    )
    transport = FakeTransport(replies)
    client = HttpProviderClient(
        provider,
        RetryPolicy(attempts=3, backoff_base=0.1, timeout=1.0),
        post_fn=transport.post,
        sleep_fn=transport.sleep,
    )
    return client, transport


class TestHttpTransport:
    def test_mock_table_lookup(self):
        provider = Provider("mt-0", ProviderKind.MT, "mock:table", "Mock")
        client = MockMtClient({("hola", "en"): "hello"})
        hyp = translate(provider, "hola", "es", "en", client=client)
        assert hyp.text == "hello"
        assert hyp.provider_id == "mt-0"

    def test_mock_table_miss(self):
        provider = Provider("mt-0", ProviderKind.MT, "mock:table", "Mock")
        with pytest.raises(ProviderError):
            translate(provider, "nope", "es", "en", client=MockMtClient({}))

    def test_retries_then_provider_error(self):
        client, transport = make_client([(500, {}), (500, {}), (500, {})])
        with pytest.raises(ProviderError) as exc_info:
            HttpMtClient(client).translate("hola", "es", "en")
        assert exc_info.value.status == 500
        assert len(transport.calls) == 3
        assert transport.sleeps == [0.1, 0.2]  # exponential backoff

    def test_recovers_after_transient_error(self):
        client, transport = make_client([(500, {}), (200, {"text": "hello"})])
        assert HttpMtClient(client).translate("hola", "es", "en") == "hello"
        assert len(transport.calls) == 2

    def test_timeout_retried_then_raised(self):
        client, transport = make_client(["timeout", "timeout", "timeout"])
        with pytest.raises(ProviderTimeout):
            HttpMtClient(client).translate("hola", "es", "en")
        assert len(transport.calls) == 3

    def test_missing_text_field(self):
        client, _ = make_client([(200, {"nope": 1})])
        with pytest.raises(MalformedResponse):
            HttpMtClient(client).translate("hola", "es", "en")

    def test_api_key_from_environment(self, monkeypatch):
        monkeypatch.setenv("MTLOOP_PROVIDER_MT_X_KEY", "sekrit")
        assert provider_api_key("mt-x") == "sekrit"
        client, transport = make_client([(200, {"text": "ok"})])
        HttpMtClient(client).translate("hola", "es", "en")
        assert transport.calls[0][1]["api_key"] == "sekrit"

    def test_wire_contract_fields(self):
        client, transport = make_client([(200, {"text": "ok"})])
        HttpMtClient(client).translate("hola", "es", "en")
        payload = transport.calls[0][1]
        assert payload["source"] == "hola"
        assert payload["source_lang"] == "es"
        assert payload["target_lang"] == "en"


class TestPromptJudgeAgainstScriptedReplies:
    def _judge(self, replies):
        provider = Provider("llm-0", ProviderKind.LLM, "http://unit.test/llm", "LLM")
        transport = FakeTransport(replies)
        client = HttpProviderClient(
            provider,
            RetryPolicy(attempts=1, backoff_base=0.0, timeout=1.0),
            post_fn=transport.post,
            sleep_fn=transport.sleep,
        )
        return PromptLlmJudge(client), transport

    def test_synthesize_round_trip(self):
        judge, transport = self._judge([(200, {"text": "la traduction"})])
        result = synthesize_translation(judge, "the fox", list(HYPS), "en", "fr")
        assert result.text == "la traduction"
        assert "1. der schnelle braune fuchs" in transport.calls[0][1]["prompt"]

    def test_score_round_trip(self):
        judge, _ = self._judge([(200, {"text": "Score: 64\nsolid"})])
        assert score_direct_assessment(judge, "hello", "bonjour", "en", "fr") == 64.0

    def test_recommend_round_trip(self):
        judge, _ = self._judge([(200, {"text": "2 — more fluent"})])
        provider_id, rationale = recommend_best(judge, "the fox", list(HYPS))
        assert provider_id == "mt-1"
        assert rationale == "more fluent"

    def test_analysis_round_trip(self):
        judge, _ = self._judge(
            [(200, {"text": "Score: 90\nResolved: Accuracy\nRemaining: none\nnice"})]
        )
        analysis = analyze_annotation(
            judge, "src", "orig", "edited", frozenset({ErrorCategory.ACCURACY})
        )
        assert analysis.score_after == 90.0
        assert analysis.resolved_categories == frozenset({ErrorCategory.ACCURACY})

    def test_multiline_synthesis_rejected(self):
        judge, _ = self._judge([(200, {"text": "line one\nline two"})])
        with pytest.raises(MalformedResponse):
            synthesize_translation(judge, "the fox", list(HYPS), "en", "fr")


class TestOperationPreconditions:
    def test_synthesize_needs_1_to_10(self):
        judge = MockLlmJudge({})
        with pytest.raises(ValueError):
            synthesize_translation(judge, "s", [], "en", "de")
        with pytest.raises(ValueError):
            synthesize_translation(
                judge, "s", [Hypothesis(f"m{i}", "t") for i in range(11)], "en", "de"
            )

    def test_recommend_needs_two(self):
        with pytest.raises(ValueError):
            recommend_best(MockLlmJudge({}), "s", [HYPS[0]])

    def test_score_needs_nonempty_hypothesis(self):
        with pytest.raises(ValueError):
            score_direct_assessment(MockLlmJudge({}), "s", "", "en", "de")

    def test_analyze_needs_nonempty_post_edit(self):
        with pytest.raises(ValueError):
            analyze_annotation(MockLlmJudge({}), "s", "orig", "", frozenset())
