"""Clients for MT, LLM, and embedding providers.

The LLM reply contract is imposed by us: a score line, optional category
lines, then free-text rationale. Parsing is lenient (first number wins,
unknown categories map to Other) so real providers stay usable, while the
mock judge is grounded in hidden reference translations and the shared TER
metric, which makes end-to-end tests analytically checkable with zero
network access.
"""

from __future__ import annotations

import os
import re
import time
from dataclasses import dataclass
from enum import Enum
from threading import BoundedSemaphore
from typing import Callable, Mapping, Protocol, Sequence

import httpx

from .domain import ErrorCategory, Hypothesis, Provider
from .errors import (
    IndexParseFailure,
    MalformedResponse,
    ProviderError,
    ProviderTimeout,
    UnparseableScore,
)
from .metrics import ter_text

LLM_ENSEMBLE_PROVIDER_ID = "llm-ensemble"


# ---------------------------------------------------------------------------
# Prompt templates
# ---------------------------------------------------------------------------


class PromptId(str, Enum):
    SYNTHESIZE = "Synthesize"
    DIRECT_ASSESS = "DirectAssess"
    ANALYZE_ANNOTATION = "AnalyzeAnnotation"
    RECOMMEND = "Recommend"


@dataclass(frozen=True)
class PromptTemplate:
    id: PromptId
    template_text: str
    version: int

    def render(self, **kwargs: str) -> str:
        try:
            return self.template_text.format(**kwargs)
        except (KeyError, IndexError) as exc:
            raise ValueError(f"missing placeholder for {self.id.value}: {exc}") from exc


SYNTHESIZE_V1 = PromptTemplate(
    id=PromptId.SYNTHESIZE,
    version=1,
    template_text=(
        "You are an expert translator merging candidate translations.\n"
        "Source ({source_lang}): {source}\n"
        "Candidate translations ({target_lang}):\n"
        "{candidates}\n"
        "Reply with exactly one line: the single best translation, combining "
        "the candidates' strengths. No commentary."
    ),
)

DIRECT_ASSESS_V1 = PromptTemplate(
    id=PromptId.DIRECT_ASSESS,
    version=1,
    template_text=(
        "Rate the translation quality on a scale from 0 (useless) to 100 (perfect).\n"
        "Source ({source_lang}): {source}\n"
        "Translation ({target_lang}): {hypothesis}\n"
        'Reply with the score first, e.g. "Score: 87". '
        "One line of justification may follow."
    ),
)

ANALYZE_ANNOTATION_V1 = PromptTemplate(
    id=PromptId.ANALYZE_ANNOTATION,
    version=1,
    template_text=(
        "A translation was post-edited. Compare the versions and report.\n"
        "Source: {source}\n"
        "Original translation: {original}\n"
        "Post-edited translation: {post_edit}\n"
        "Error categories previously marked: {prior_categories}\n"
        "Reply in this structure:\n"
        "Score: <0-100 quality of the post-edited translation>\n"
        "Resolved: <categories fixed by the edit, comma-separated, or none>\n"
        "Remaining: <categories still present, comma-separated, or none>\n"
        "<free-text feedback>"
    ),
)

RECOMMEND_V1 = PromptTemplate(
    id=PromptId.RECOMMEND,
    version=1,
    template_text=(
        "Pick the best translation of the source.\n"
        "Source: {source}\n"
        "Candidates:\n"
        "{candidates}\n"
        "Reply with the candidate number (1-{n}) first, then a short reason."
    ),
)


def numbered_candidates(texts: Sequence[str]) -> str:
    return "\n".join(f"{i + 1}. {text}" for i, text in enumerate(texts))


# ---------------------------------------------------------------------------
# Reply parsing
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")
_LEADING_INDEX_RE = re.compile(r"\s*(\d+)")
_CATEGORY_NORMALIZE_RE = re.compile(r"[^a-z0-9]")


def parse_da_score(reply: str) -> float:
    """First number in the reply, clamped to [0, 100]."""
    match = _NUMBER_RE.search(reply)
    if match is None:
        raise UnparseableScore(f"no number in reply {reply!r}")
    return min(100.0, max(0.0, float(match.group(0))))


def parse_recommendation(reply: str, n_candidates: int) -> tuple[int, str]:
    """Leading 1-based candidate index plus the remaining text as rationale."""
    match = _LEADING_INDEX_RE.match(reply)
    if match is None:
        raise IndexParseFailure(f"reply does not start with an index: {reply!r}")
    index = int(match.group(1))
    if not 1 <= index <= n_candidates:
        raise IndexParseFailure(
            f"index {index} outside 1..{n_candidates} in reply {reply!r}"
        )
    rationale = reply[match.end() :].strip().lstrip("—-–:.,").strip()
    return index, rationale


_KNOWN_CATEGORIES = {
    _CATEGORY_NORMALIZE_RE.sub("", c.value.casefold()): c for c in ErrorCategory
}


def parse_category(name: str) -> ErrorCategory:
    """Lenient category lookup; anything unrecognized maps to Other."""
    key = _CATEGORY_NORMALIZE_RE.sub("", name.casefold())
    return _KNOWN_CATEGORIES.get(key, ErrorCategory.OTHER)


def _parse_category_list(raw: str) -> frozenset[ErrorCategory]:
    names = [part.strip() for part in raw.split(",")]
    names = [n for n in names if n and n.casefold() not in ("none", "n/a", "-")]
    return frozenset(parse_category(n) for n in names)


@dataclass(frozen=True)
class LlmAnalysis:
    resolved_categories: frozenset[ErrorCategory]
    remaining_categories: frozenset[ErrorCategory]
    feedback_text: str
    score_after: float

    def __post_init__(self) -> None:
        overlap = self.resolved_categories & self.remaining_categories
        if overlap:
            raise ValueError(f"categories both resolved and remaining: {overlap}")


def parse_analysis(reply: str) -> LlmAnalysis:
    """Parse the structured analysis reply.

    A category claimed both resolved and remaining counts as remaining (the
    conservative reading). A missing score line is a malformed reply.
    """
    score = None
    resolved: frozenset[ErrorCategory] = frozenset()
    remaining: frozenset[ErrorCategory] = frozenset()
    feedback_lines = []
    for line in reply.splitlines():
        stripped = line.strip()
        lowered = stripped.casefold()
        if lowered.startswith("score"):
            score = parse_da_score(stripped)
        elif lowered.startswith("resolved"):
            resolved = _parse_category_list(stripped.split(":", 1)[-1])
        elif lowered.startswith("remaining"):
            remaining = _parse_category_list(stripped.split(":", 1)[-1])
        elif stripped:
            feedback_lines.append(stripped)
    if score is None:
        raise MalformedResponse(f"analysis reply lacks a score line: {reply!r}")
    return LlmAnalysis(
        resolved_categories=resolved - remaining,
        remaining_categories=remaining,
        feedback_text="\n".join(feedback_lines),
        score_after=score,
    )


def parse_single_segment(reply: str) -> str:
    """The synthesized translation must be exactly one nonempty line."""
    text = reply.strip()
    if not text or "\n" in text:
        raise MalformedResponse(f"expected a single-line translation, got {reply!r}")
    return text


# ---------------------------------------------------------------------------
# Transports
# ---------------------------------------------------------------------------

# An HTTP post function returns (status_code, reply_json). Injectable so the
# whole suite runs without sockets.
PostFn = Callable[[str, dict, float], tuple[int, dict]]


def _default_post(url: str, payload: dict, timeout: float) -> tuple[int, dict]:
    try:
        response = httpx.post(url, json=payload, timeout=timeout)
    except httpx.TimeoutException as exc:
        raise ProviderTimeout(str(exc)) from exc
    try:
        body = response.json()
    except ValueError:
        body = {}
    return response.status_code, body


def provider_api_key(provider_id: str) -> str | None:
    env_name = "MTLOOP_PROVIDER_" + re.sub(r"[^A-Z0-9]", "_", provider_id.upper()) + "_KEY"
    return os.environ.get(env_name)


@dataclass
class RetryPolicy:
    attempts: int = 3
    backoff_base: float = 0.2
    timeout: float = 10.0


class HttpProviderClient:
    """POSTs the provider wire contract with bounded retries and a
    per-provider concurrency cap."""

    def __init__(
        self,
        provider: Provider,
        policy: RetryPolicy | None = None,
        max_concurrency: int = 4,
        post_fn: PostFn = _default_post,
        sleep_fn: Callable[[float], None] = time.sleep,
    ):
        self.provider = provider
        self.policy = policy or RetryPolicy()
        self._semaphore = BoundedSemaphore(max_concurrency)
        self._post = post_fn
        self._sleep = sleep_fn

    def call(self, payload: dict) -> dict:
        key = provider_api_key(self.provider.id)
        if key is not None:
            payload = {**payload, "api_key": key}
        last_status = 0
        for attempt in range(self.policy.attempts):
            if attempt:
                self._sleep(self.policy.backoff_base * (2 ** (attempt - 1)))
            with self._semaphore:
                try:
                    status, body = self._post(
                        self.provider.endpoint, payload, self.policy.timeout
                    )
                except ProviderTimeout:
                    if attempt == self.policy.attempts - 1:
                        raise
                    continue
            if status == 200:
                return body
            last_status = status
        raise ProviderError(last_status)


# ---------------------------------------------------------------------------
# MT translation
# ---------------------------------------------------------------------------


class MtClient(Protocol):
    def translate(self, source: str, source_lang: str, target_lang: str) -> str: ...


class HttpMtClient:
    def __init__(self, client: HttpProviderClient):
        self._client = client

    def translate(self, source: str, source_lang: str, target_lang: str) -> str:
        body = self._client.call(
            {"source": source, "source_lang": source_lang, "target_lang": target_lang}
        )
        if "text" not in body:
            raise MalformedResponse(f"MT reply lacks 'text': {body!r}")
        return body["text"]


class MockMtClient:
    """Translation by table lookup, keyed on (source, target_lang)."""

    def __init__(self, table: Mapping[tuple[str, str], str]):
        self._table = dict(table)

    def translate(self, source: str, source_lang: str, target_lang: str) -> str:
        try:
            return self._table[(source, target_lang)]
        except KeyError:
            raise ProviderError(404, f"no mock translation for {source!r}")


def translate(
    provider: Provider,
    source: str,
    source_lang: str,
    target_lang: str,
    client: MtClient | None = None,
) -> Hypothesis:
    """One hypothesis from an MT provider (HTTP with retry, or a mock)."""
    if client is None:
        client = HttpMtClient(HttpProviderClient(provider))
    text = client.translate(source, source_lang, target_lang)
    return Hypothesis(provider_id=provider.id, text=text)


# ---------------------------------------------------------------------------
# LLM judge: live and mock
# ---------------------------------------------------------------------------


class LlmJudge(Protocol):
    """The four LLM capabilities the loop consumes."""

    def synthesize(
        self, source: str, hypotheses: Sequence[Hypothesis], source_lang: str, target_lang: str
    ) -> str: ...

    def direct_assessment(
        self, source: str, hypothesis: str, source_lang: str, target_lang: str
    ) -> float: ...

    def analyze(
        self,
        source: str,
        original_hypothesis: str,
        post_edit: str,
        prior_categories: frozenset[ErrorCategory],
    ) -> LlmAnalysis: ...

    def recommend(
        self, source: str, hypotheses: Sequence[Hypothesis]
    ) -> tuple[str, str]: ...


class PromptLlmJudge:
    """Live judge: renders the versioned templates, calls the provider
    endpoint, parses the structured replies."""

    def __init__(self, client: HttpProviderClient):
        self._client = client

    def _complete(self, prompt: str, extra: dict) -> str:
        body = self._client.call({**extra, "prompt": prompt})
        if "text" not in body:
            raise MalformedResponse(f"LLM reply lacks 'text': {body!r}")
        return body["text"]

    def synthesize(self, source, hypotheses, source_lang, target_lang):
        prompt = SYNTHESIZE_V1.render(
            source=source,
            source_lang=source_lang,
            target_lang=target_lang,
            candidates=numbered_candidates([h.text for h in hypotheses]),
        )
        reply = self._complete(
            prompt,
            {
                "source": source,
                "source_lang": source_lang,
                "target_lang": target_lang,
                "candidates": [h.text for h in hypotheses],
            },
        )
        return parse_single_segment(reply)

    def direct_assessment(self, source, hypothesis, source_lang, target_lang):
        prompt = DIRECT_ASSESS_V1.render(
            source=source,
            source_lang=source_lang,
            target_lang=target_lang,
            hypothesis=hypothesis,
        )
        reply = self._complete(
            prompt,
            {"source": source, "source_lang": source_lang, "target_lang": target_lang},
        )
        return parse_da_score(reply)

    def analyze(self, source, original_hypothesis, post_edit, prior_categories):
        prompt = ANALYZE_ANNOTATION_V1.render(
            source=source,
            original=original_hypothesis,
            post_edit=post_edit,
            prior_categories=", ".join(sorted(c.value for c in prior_categories))
            or "none",
        )
        reply = self._complete(prompt, {"source": source})
        return parse_analysis(reply)

    def recommend(self, source, hypotheses):
        prompt = RECOMMEND_V1.render(
            source=source,
            candidates=numbered_candidates([h.text for h in hypotheses]),
            n=str(len(hypotheses)),
        )
        reply = self._complete(
            prompt, {"source": source, "candidates": [h.text for h in hypotheses]}
        )
        index, rationale = parse_recommendation(reply, len(hypotheses))
        return hypotheses[index - 1].provider_id, rationale


class MockLlmJudge:
    """Deterministic judge grounded in hidden reference translations.

    Assessment is 100 * (1 - TER against the hidden reference), clamped, so
    every mock behavior is analytically checkable. Sources without a hidden
    reference score a neutral 50.
    """

    def __init__(self, hidden_references: Mapping[str, str]):
        self._refs = dict(hidden_references)

    def _score(self, source: str, hypothesis: str) -> float:
        ref = self._refs.get(source)
        if ref is None:
            return 50.0
        return min(100.0, max(0.0, 100.0 * (1.0 - ter_text(hypothesis, ref))))

    def synthesize(self, source, hypotheses, source_lang, target_lang):
        best = max(
            range(len(hypotheses)),
            key=lambda i: (self._score(source, hypotheses[i].text), -i),
        )
        return hypotheses[best].text

    def direct_assessment(self, source, hypothesis, source_lang, target_lang):
        return self._score(source, hypothesis)

    def analyze(self, source, original_hypothesis, post_edit, prior_categories):
        before = self._score(source, original_hypothesis)
        after = self._score(source, post_edit)
        if post_edit != original_hypothesis and after >= before:
            resolved, remaining = frozenset(prior_categories), frozenset()
        else:
            resolved, remaining = frozenset(), frozenset(prior_categories)
        return LlmAnalysis(
            resolved_categories=resolved,
            remaining_categories=remaining,
            feedback_text=f"score moved from {before:.1f} to {after:.1f}",
            score_after=after,
        )

    def recommend(self, source, hypotheses):
        best = max(
            range(len(hypotheses)),
            key=lambda i: (self._score(source, hypotheses[i].text), -i),
        )
        return (
            hypotheses[best].provider_id,
            f"highest assessed quality among {len(hypotheses)} candidates",
        )


# ---------------------------------------------------------------------------
# Operation-level entry points
# ---------------------------------------------------------------------------


def synthesize_translation(
    judge: LlmJudge,
    source: str,
    hypotheses: Sequence[Hypothesis],
    source_lang: str,
    target_lang: str,
) -> Hypothesis:
    """Ensemble the hypotheses into one refined translation, attached under
    the reserved llm-ensemble provider id."""
    if not 1 <= len(hypotheses) <= 10:
        raise ValueError(f"need 1..10 hypotheses, got {len(hypotheses)}")
    text = judge.synthesize(source, hypotheses, source_lang, target_lang)
    return Hypothesis(provider_id=LLM_ENSEMBLE_PROVIDER_ID, text=text)


def score_direct_assessment(
    judge: LlmJudge, source: str, hypothesis: str, source_lang: str, target_lang: str
) -> float:
    if not hypothesis:
        raise ValueError("hypothesis must be nonempty")
    return judge.direct_assessment(source, hypothesis, source_lang, target_lang)


def analyze_annotation(
    judge: LlmJudge,
    source: str,
    original_hypothesis: str,
    post_edit: str,
    prior_categories: frozenset[ErrorCategory],
) -> LlmAnalysis:
    if not post_edit:
        raise ValueError("post_edit must be nonempty")
    return judge.analyze(source, original_hypothesis, post_edit, prior_categories)


def recommend_best(
    judge: LlmJudge, source: str, hypotheses: Sequence[Hypothesis]
) -> tuple[str, str]:
    if len(hypotheses) < 2:
        raise ValueError(f"need at least 2 hypotheses, got {len(hypotheses)}")
    return judge.recommend(source, hypotheses)
