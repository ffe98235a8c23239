"""Feature extraction for the online learner.

Surface features only; richer signals (POS, morphology, embeddings) arrive
through an external provider and are concatenated via :func:`assemble`. The
tokenizer is shared with the evaluation metrics so training and scoring
never disagree.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import DimensionMismatch
from .metrics import tokenize

SURFACE_SCHEMA_VERSION = 1

SURFACE_FEATURE_NAMES = (
    "src_token_count",
    "src_char_count",
    "src_mean_token_len",
    "src_punct_count",
    "src_digit_count",
    "src_type_token_ratio",
    "hyp_token_count",
    "hyp_char_count",
    "hyp_mean_token_len",
    "hyp_punct_count",
    "hyp_digit_count",
    "hyp_type_token_ratio",
    "token_count_ratio",
    "char_count_ratio",
    "abs_char_delta",
)


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    names: tuple[str, ...]
    schema_version: int

    def __post_init__(self) -> None:
        if len(self.values) != len(self.names):
            raise DimensionMismatch(
                f"{len(self.values)} values vs {len(self.names)} names"
            )

    def __len__(self) -> int:
        return len(self.values)


class FeatureProvider(Protocol):
    """External source of extra features (e.g. cross-lingual embeddings)."""

    @property
    def dimension(self) -> int: ...

    def embed(self, source: str, hypothesis: str) -> Sequence[float]: ...


def _side_features(text: str) -> list[float]:
    tokens = tokenize(text)
    n_tokens = len(tokens)
    n_chars = len(text)
    mean_len = sum(len(t) for t in tokens) / n_tokens if n_tokens else 0.0
    punct = sum(1 for ch in text if unicodedata.category(ch).startswith("P"))
    digits = sum(1 for ch in text if ch.isdigit())
    ttr = len(set(tokens)) / n_tokens if n_tokens else 0.0
    return [float(n_tokens), float(n_chars), mean_len, float(punct), float(digits), ttr]


def extract_surface(source: str, hypothesis: str) -> FeatureVector:
    """Deterministic surface features for a (source, hypothesis) pair.

    Ratio features are hypothesis/source and fall back to 1.0 when the
    source side has nothing to divide by.
    """
    src = _side_features(source)
    hyp = _side_features(hypothesis)
    token_ratio = hyp[0] / src[0] if src[0] else 1.0
    char_ratio = hyp[1] / src[1] if src[1] else 1.0
    abs_char_delta = abs(hyp[1] - src[1])
    return FeatureVector(
        values=tuple(src + hyp + [token_ratio, char_ratio, abs_char_delta]),
        names=SURFACE_FEATURE_NAMES,
        schema_version=SURFACE_SCHEMA_VERSION,
    )


def assembled_schema_version(embedding_dim: int) -> int:
    """Schema version is a function of the embedding dimension, so a change
    in provider dimension forces a version bump."""
    return SURFACE_SCHEMA_VERSION + embedding_dim


def assemble(
    surface: FeatureVector,
    embedding: Sequence[float] | None,
    embedding_dim: int | None = None,
) -> FeatureVector:
    """Concatenate surface features with a provider embedding.

    ``embedding_dim`` is the dimension registered for the provider; a vector
    of any other length is rejected.
    """
    if embedding is None:
        return surface
    expected = embedding_dim if embedding_dim is not None else len(embedding)
    if len(embedding) != expected:
        raise DimensionMismatch(
            f"embedding has {len(embedding)} dims, provider registered {expected}"
        )
    emb_names = tuple(f"emb_{i}" for i in range(len(embedding)))
    return FeatureVector(
        values=surface.values + tuple(float(v) for v in embedding),
        names=surface.names + emb_names,
        schema_version=assembled_schema_version(len(embedding)),
    )


def schema_checksum(fv: FeatureVector) -> str:
    """Digest over (names, schema_version); value-preserving name permutations
    change the checksum."""
    payload = json.dumps([fv.schema_version, list(fv.names)]).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def feature_schema_json(embedding_dim: int = 0) -> str:
    """Schema export (names + version) for external providers and UI labels."""
    names = list(SURFACE_FEATURE_NAMES) + [f"emb_{i}" for i in range(embedding_dim)]
    version = (
        assembled_schema_version(embedding_dim) if embedding_dim else SURFACE_SCHEMA_VERSION
    )
    return json.dumps({"schema_version": version, "names": names}, indent=2)
