"""Online quality-estimation learner.

Three linear heads share one feature schema: a quality regressor trained
toward the teacher metric, a TER regressor trained on observed post-edit
TER, and a softmax ranker trained on which hypothesis the annotator chose.
Updates are functional: every committed step returns a fresh ModelState
with version+1 and leaves the prior state untouched, so readers can keep
predicting against a snapshot while the single writer trains.

Hyperparameter selection is deterministic progressive-validation racing:
each candidate replays the history predict-then-update and the lowest
accumulated loss wins (ties go to the first candidate).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, InsufficientHistory, SchemaMismatch
from .features import FeatureVector

MAX_RANKED_HYPOTHESES = 10


@dataclass(frozen=True)
class Hyperparams:
    learning_rate: float = 0.05
    l2: float = 0.0

    def __post_init__(self) -> None:
        # lr = 0 is a legal fixed point (updates bump the version and leave
        # weights untouched), which keeps no-op training observable.
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")

    def to_dict(self) -> dict:
        return {"learning_rate": self.learning_rate, "l2": self.l2}


@dataclass(frozen=True)
class ModelState:
    version: int
    schema_version: int
    regressor_weights: tuple[float, ...]  # quality head, bias last
    ter_weights: tuple[float, ...]  # TER head, bias last
    ranker_weights: tuple[float, ...]  # best-hypothesis head, bias last
    update_count: int
    hyperparams: Hyperparams

    @property
    def dim(self) -> int:
        return len(self.regressor_weights) - 1

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "schema_version": self.schema_version,
            "regressor_weights": list(self.regressor_weights),
            "ter_weights": list(self.ter_weights),
            "ranker_weights": list(self.ranker_weights),
            "update_count": self.update_count,
            "hyperparams": self.hyperparams.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelState":
        return cls(
            version=data["version"],
            schema_version=data["schema_version"],
            regressor_weights=tuple(data["regressor_weights"]),
            ter_weights=tuple(data["ter_weights"]),
            ranker_weights=tuple(data["ranker_weights"]),
            update_count=data["update_count"],
            hyperparams=Hyperparams(**data["hyperparams"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, raw: str) -> "ModelState":
        return cls.from_dict(json.loads(raw))


@dataclass(frozen=True)
class Prediction:
    quality: float
    ter_estimate: float
    confidence: float
    model_version: int


@dataclass(frozen=True)
class RankResult:
    order: tuple[int, ...]
    probabilities: tuple[float, ...]
    margin: float

    @property
    def confidence(self) -> float:
        return self.probabilities[self.order[0]]


# Teacher scores live on a 0..100 scale while the ranker's gradients are
# O(1); the quality head trains against score/QUALITY_SCALE and predictions
# denormalize, so a single shared learning rate conditions all heads.
QUALITY_SCALE = 100.0

# Cross-entropy gradients vanish as the ranker gets confident, so its margin
# grows only logarithmically in update count; a larger fixed step multiple
# (relative to the squared-loss heads, which are bound by LMS stability)
# lets desk-scale budgets reach decisive softmax probabilities.
RANKER_STEP_SCALE = 20.0


def fresh_state(
    dim: int, schema_version: int, hyperparams: Hyperparams | None = None
) -> ModelState:
    zeros = tuple(0.0 for _ in range(dim + 1))
    return ModelState(
        version=0,
        schema_version=schema_version,
        regressor_weights=zeros,
        ter_weights=zeros,
        ranker_weights=zeros,
        update_count=0,
        hyperparams=hyperparams or Hyperparams(),
    )


def _check_schema(state: ModelState, fv: FeatureVector) -> None:
    if fv.schema_version != state.schema_version or len(fv) != state.dim:
        raise SchemaMismatch(
            f"feature schema v{fv.schema_version}/{len(fv)}d does not match "
            f"model schema v{state.schema_version}/{state.dim}d"
        )


def _augment(fv: FeatureVector) -> np.ndarray:
    """Feature values with the bias input appended."""
    return np.append(np.asarray(fv.values, dtype=np.float64), 1.0)


# ---------------------------------------------------------------------------
# Squared-loss heads (quality and TER)
# ---------------------------------------------------------------------------


def regressor_loss(weights: np.ndarray, x: np.ndarray, y: float, l2: float) -> float:
    """0.5 * (w.x - y)^2 + 0.5 * l2 * ||w||^2 with the bias unregularized.
    ``x`` carries the bias input (trailing 1)."""
    err = float(weights @ x) - y
    return 0.5 * err * err + 0.5 * l2 * float(weights[:-1] @ weights[:-1])


def regressor_gradient(
    weights: np.ndarray, x: np.ndarray, y: float, l2: float
) -> np.ndarray:
    err = float(weights @ x) - y
    grad = err * x
    grad[:-1] += l2 * weights[:-1]
    return grad


# Single outlier errors cannot blow up the squared-loss heads: the update
# direction is exact but its length is capped, which keeps the heads stable
# at learning rates the softmax ranker wants.
SQUARED_LOSS_GRAD_CLIP = 1.0


def _sgd_step(
    weights: tuple[float, ...], x: np.ndarray, y: float, hp: Hyperparams
) -> tuple[float, ...]:
    w = np.asarray(weights, dtype=np.float64)
    grad = regressor_gradient(w, x, y, hp.l2)
    norm = float(np.linalg.norm(grad))
    if norm > SQUARED_LOSS_GRAD_CLIP:
        grad = grad * (SQUARED_LOSS_GRAD_CLIP / norm)
    w = w - hp.learning_rate * grad
    return tuple(w.tolist())


def update_regressor(
    state: ModelState, fv: FeatureVector, teacher_score: float
) -> ModelState:
    """One regularized gradient step of the quality head toward the teacher
    score. Returns a new state at version+1; the input state is unchanged."""
    _check_schema(state, fv)
    return replace(
        state,
        version=state.version + 1,
        update_count=state.update_count + 1,
        regressor_weights=_sgd_step(
            state.regressor_weights,
            _augment(fv),
            teacher_score / QUALITY_SCALE,
            state.hyperparams,
        ),
    )


def update_ter(state: ModelState, fv: FeatureVector, observed_ter: float) -> ModelState:
    """Same squared-loss step for the TER head, trained only on observed
    post-edit TER values."""
    _check_schema(state, fv)
    return replace(
        state,
        version=state.version + 1,
        update_count=state.update_count + 1,
        ter_weights=_sgd_step(
            state.ter_weights, _augment(fv), observed_ter, state.hyperparams
        ),
    )


# ---------------------------------------------------------------------------
# Softmax ranker
# ---------------------------------------------------------------------------


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def _hypothesis_matrix(state: ModelState, fvs: Sequence[FeatureVector]) -> np.ndarray:
    for fv in fvs:
        _check_schema(state, fv)
    return np.stack([_augment(fv) for fv in fvs])


def ranker_loss(
    weights: np.ndarray, xs: np.ndarray, chosen: int, l2: float
) -> float:
    """Cross-entropy of the softmax over per-hypothesis scores, plus L2 on
    the non-bias weights. ``xs`` rows carry the bias input."""
    probs = _softmax(xs @ weights)
    return -float(np.log(probs[chosen])) + 0.5 * l2 * float(
        weights[:-1] @ weights[:-1]
    )


def ranker_gradient(
    weights: np.ndarray, xs: np.ndarray, chosen: int, l2: float
) -> np.ndarray:
    probs = _softmax(xs @ weights)
    coeff = probs.copy()
    coeff[chosen] -= 1.0
    grad = coeff @ xs
    grad[:-1] += l2 * weights[:-1]
    return grad


def update_ranker(
    state: ModelState, segment_features: Sequence[FeatureVector], chosen: int
) -> ModelState:
    """Multinomial-logistic step toward the chosen hypothesis.

    A single-hypothesis segment is a committed no-op (nothing to rank
    against), still bumping the version.
    """
    if len(segment_features) == 0:
        raise IndexOutOfRange("segment has no hypotheses")
    if len(segment_features) > MAX_RANKED_HYPOTHESES:
        raise IndexOutOfRange(
            f"segment has {len(segment_features)} hypotheses, max {MAX_RANKED_HYPOTHESES}"
        )
    if not 0 <= chosen < len(segment_features):
        raise IndexOutOfRange(
            f"chosen index {chosen} outside 0..{len(segment_features) - 1}"
        )
    xs = _hypothesis_matrix(state, segment_features)
    new_weights = state.ranker_weights
    if len(segment_features) > 1:
        w = np.asarray(state.ranker_weights, dtype=np.float64)
        step = RANKER_STEP_SCALE * state.hyperparams.learning_rate
        w = w - step * ranker_gradient(w, xs, chosen, state.hyperparams.l2)
        new_weights = tuple(w.tolist())
    return replace(
        state,
        version=state.version + 1,
        update_count=state.update_count + 1,
        ranker_weights=new_weights,
    )


def rank_best(
    state: ModelState, segment_features: Sequence[FeatureVector]
) -> RankResult:
    """Hypothesis indices by descending softmax probability (ties broken by
    lower index), the probabilities, and the top-two margin."""
    if len(segment_features) == 0:
        raise IndexOutOfRange("segment has no hypotheses")
    xs = _hypothesis_matrix(state, segment_features)
    probs = _softmax(xs @ np.asarray(state.ranker_weights, dtype=np.float64))
    order = tuple(sorted(range(len(probs)), key=lambda i: (-probs[i], i)))
    margin = (
        1.0
        if len(probs) == 1
        else float(probs[order[0]] - probs[order[1]])
    )
    return RankResult(
        order=order,
        probabilities=tuple(float(p) for p in probs),
        margin=margin,
    )


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------


def predict(
    state: ModelState,
    fv: FeatureVector,
    pool: Sequence[FeatureVector] | None = None,
) -> Prediction:
    """Quality and TER estimates for one hypothesis.

    ``pool`` is the full hypothesis pool of the segment; confidence is the
    ranker's top softmax probability over it (1/n for an untrained model,
    1.0 for a single-hypothesis pool).
    """
    _check_schema(state, fv)
    x = _augment(fv)
    quality = float(
        np.clip(
            QUALITY_SCALE * (np.asarray(state.regressor_weights, dtype=np.float64) @ x),
            0.0,
            100.0,
        )
    )
    ter_estimate = max(
        float(np.asarray(state.ter_weights, dtype=np.float64) @ x), 0.0
    )
    rank = rank_best(state, pool if pool is not None else [fv])
    return Prediction(
        quality=quality,
        ter_estimate=ter_estimate,
        confidence=rank.confidence,
        model_version=state.version,
    )


def predict_segment(
    state: ModelState, fvs: Sequence[FeatureVector]
) -> list[Prediction]:
    """Per-hypothesis predictions sharing the segment's ranker confidence."""
    if len(fvs) == 0:
        return []
    rank = rank_best(state, fvs)
    out = []
    for fv in fvs:
        x = _augment(fv)
        quality = float(
            np.clip(
                QUALITY_SCALE
                * (np.asarray(state.regressor_weights, dtype=np.float64) @ x),
                0.0,
                100.0,
            )
        )
        ter_estimate = max(
            float(np.asarray(state.ter_weights, dtype=np.float64) @ x), 0.0
        )
        out.append(
            Prediction(
                quality=quality,
                ter_estimate=ter_estimate,
                confidence=rank.confidence,
                model_version=state.version,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Hyperparameter racing
# ---------------------------------------------------------------------------

MIN_RACE_HISTORY = 20


def progressive_validation_loss(
    history: Sequence[tuple[FeatureVector, float]], hp: Hyperparams
) -> float:
    """Mean squared error of predict-before-update over the history in its
    given order. Non-finite trajectories score +inf so divergent candidates
    lose deterministically."""
    first_fv = history[0][0]
    state = fresh_state(len(first_fv), first_fv.schema_version, hp)
    total = 0.0
    for fv, target in history:
        pred = predict(state, fv).quality
        err = pred - target
        total += err * err
        state = update_regressor(state, fv, target)
        if not np.isfinite(state.regressor_weights).all():
            return float("inf")
    loss = total / len(history)
    return loss if np.isfinite(loss) else float("inf")


def race_hyperparams(
    history: Sequence[tuple[FeatureVector, float]],
    candidates: Sequence[Hyperparams],
) -> Hyperparams:
    """Deterministic racing: lowest progressive-validation loss wins, ties
    broken by candidate order."""
    if len(history) < MIN_RACE_HISTORY:
        raise InsufficientHistory(
            f"need at least {MIN_RACE_HISTORY} examples, got {len(history)}"
        )
    if not candidates:
        raise ValueError("candidate list is empty")
    best = candidates[0]
    best_loss = progressive_validation_loss(history, best)
    for hp in candidates[1:]:
        loss = progressive_validation_loss(history, hp)
        if loss < best_loss:
            best, best_loss = hp, loss
    return best
