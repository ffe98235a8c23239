"""Batch simulation harness.

Replays a corpus through the full loop with a synthetic annotator and mock
providers. The synthetic corpus carries a hidden reference per segment;
each mock MT provider emits the reference corrupted at a provider-specific
rate scaled by segment difficulty, so provider quality ordering is known
ground truth and every reported number is checkable. Runs are fully
determined by the seed; reports are byte-identical across repeats.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .domain import Annotation, ErrorCategory, Hypothesis, Segment
from .errors import BudgetZero, CorpusParseError
from .features import extract_surface
from .learner import Hyperparams
from .metrics import ter_text
from .providers import MockLlmJudge
from .scheduler import Strategy
from .service import AnnotationService, ServiceConfig, scale_features
from .store import MemoryEventLog, write_events

RANDOM_STRATEGY = "random"

_VALID_STRATEGIES = tuple(s.value for s in Strategy) + (RANDOM_STRATEGY,)

# Fixed source vocabulary of short words. Each maps word-for-word to a
# target word of varied (mostly longer) length, so reference length is a
# segment-dependent offset from source length rather than a copy of it.
WORDS = (
    "ab al an ar at ba be bo da de do el en es fa fi go ha he hi "
    "ir is ka ke ki la le li lo ma me mi mo na ne no nu or os pa "
    "pe pi po ra re ri ro sa se si so ta te ti to un ur va ve vi "
    "bora cael dunai ferol gilan hasol jurem kalin lumet maro nevi "
    "orad pelu quasi rovel silan tamur velor wirel xanto yorem zemil"
).split()


def _build_target_map() -> dict[str, str]:
    # Deterministic constant map (fixed seed, independent of corpus seed).
    rng = np.random.default_rng(20240817)
    letters = "aeiouymnlrst"
    mapping = {}
    for word in WORDS:
        length = int(rng.integers(4, 8))
        mapping[word] = "".join(
            letters[int(i)] for i in rng.integers(0, len(letters), length)
        )
    return mapping


TARGET_MAP = _build_target_map()

_JUNK_LETTERS = "bcdfghjklmnpqrstvwz"

TOPICS = ("news", "legal", "medical", "chat")


@dataclass(frozen=True)
class SimulationConfig:
    corpus_path: str | None = None
    n_segments: int = 200
    n_providers: int = 5
    seed: int = 0
    annotator_noise: float = 0.0
    strategy: str = Strategy.TRIPARTITE.value
    tau: float = 0.9
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    budget: int = 100
    holdout_fraction: float = 0.3
    eval_every: int = 10
    learning_rate: float = 0.05
    l2: float = 1e-4

    def validate(self) -> list[str]:
        problems = []
        if not 2 <= self.n_providers <= 10:
            problems.append(f"n_providers {self.n_providers} outside 2..10")
        if not 0.0 <= self.annotator_noise <= 1.0:
            problems.append(f"annotator_noise {self.annotator_noise} outside [0, 1]")
        if self.strategy not in _VALID_STRATEGIES:
            problems.append(
                f"strategy {self.strategy!r} not one of {_VALID_STRATEGIES}"
            )
        if not 0.0 <= self.tau <= 1.0:
            problems.append(f"tau {self.tau} outside [0, 1]")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1) > 1e-9:
            problems.append(f"weights {self.weights} invalid")
        if self.budget < 0:
            problems.append(f"budget {self.budget} must be >= 0")
        if not 0.0 < self.holdout_fraction < 1.0:
            problems.append(f"holdout_fraction {self.holdout_fraction} outside (0, 1)")
        if self.n_segments < 4:
            problems.append(f"n_segments {self.n_segments} too small")
        return problems


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------


def generate_corpus(
    n_segments: int, seed: int, out_path: str | Path | None = None
) -> list[dict]:
    """Synthetic segments: a hidden reference sentence plus a difficulty
    knob that scales every provider's corruption rate on that segment."""
    rng = np.random.default_rng([seed, 7919])
    rows = []
    for i in range(n_segments):
        n_tokens = int(rng.integers(6, 13))
        tokens = [WORDS[int(j)] for j in rng.integers(0, len(WORDS), n_tokens)]
        text = " ".join(tokens)
        reference = " ".join(TARGET_MAP[t] for t in tokens)
        # Bimodal difficulty: easy segments give every provider a near-perfect
        # hypothesis (little to learn from), hard ones separate the providers.
        if rng.random() < 0.40:
            difficulty = 0.05 + 0.25 * float(rng.random())
        else:
            difficulty = 0.90 + 0.90 * float(rng.random())
        rows.append(
            {
                "id": f"seg-{i:04d}",
                "source_text": text,
                "source_lang": "en",
                "target_lang": "xx",
                "reference": reference,
                "difficulty": round(difficulty, 6),
                "topic": TOPICS[int(rng.integers(0, len(TOPICS)))],
            }
        )
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    return rows


def load_corpus(path: str | Path) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                row = json.loads(line)
                for key in ("id", "source_text", "source_lang", "target_lang", "reference"):
                    if key not in row:
                        raise KeyError(key)
                rows.append(row)
    except OSError as exc:
        raise CorpusParseError(f"cannot read corpus {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise CorpusParseError(f"bad corpus line {line_no} in {path}: {exc}") from exc
    if not rows:
        raise CorpusParseError(f"corpus {path} is empty")
    return rows


def _junk_word(rng: np.random.Generator) -> str:
    # Visibly longer than target-vocabulary words so substituted or inserted
    # junk shows up strongly in token-length features.
    length = int(rng.integers(10, 16))
    return "".join(_JUNK_LETTERS[int(i)] for i in rng.integers(0, len(_JUNK_LETTERS), length))


_OP_CATEGORIES = {
    "substitute": ErrorCategory.ACCURACY,
    "delete": ErrorCategory.FLUENCY,
    "insert": ErrorCategory.STYLE,
}


def _corrupt(
    tokens: Sequence[str], p: float, rng: np.random.Generator
) -> tuple[str, frozenset[ErrorCategory]]:
    """Three op flavors with distinct surface signatures: junk substitution
    (long foreign token), omission (the word degrades to an orphan comma),
    and junk insertion. Each costs one reference edit."""
    out = []
    cats = set()
    for tok in tokens:
        roll = rng.random()
        if roll < p * 0.5:
            out.append(_junk_word(rng))
            cats.add(_OP_CATEGORIES["substitute"])
        elif roll < p * 0.8:
            out.append(",")
            cats.add(_OP_CATEGORIES["delete"])
        else:
            out.append(tok)
        if rng.random() < p * 0.2:
            out.append(_junk_word(rng))
            cats.add(_OP_CATEGORIES["insert"])
    if not out:
        out = [_junk_word(rng)]
        cats.add(_OP_CATEGORIES["substitute"])
    return " ".join(out), frozenset(cats)


def provider_corruption_rate(provider_index: int, n_providers: int, difficulty: float) -> float:
    # Rates are deliberately close so the per-segment winner varies across
    # providers; picking one provider blindly is not a competitive policy.
    base = 0.16 + 0.08 * provider_index / max(n_providers - 1, 1)
    return float(min(0.9, max(0.0, base * difficulty)))


@dataclass
class SimEnvironment:
    """Hidden ground truth the mock providers and synthetic annotator share."""

    train_segments: list[Segment]
    holdout_segments: list[Segment]
    reference: dict[str, str]
    das: dict[str, list[float]]
    categories: dict[str, list[frozenset[ErrorCategory]]]
    best_idx: dict[str, int]
    hidden_refs: dict[str, str]
    provider_ids: list[str]


def build_environment(corpus: Sequence[dict], cfg: SimulationConfig) -> SimEnvironment:
    provider_ids = [f"mt-{i}" for i in range(cfg.n_providers)]
    reference: dict[str, str] = {}
    das: dict[str, list[float]] = {}
    categories: dict[str, list[frozenset[ErrorCategory]]] = {}
    best_idx: dict[str, int] = {}
    hidden_refs: dict[str, str] = {}
    segments: list[Segment] = []

    for seg_index, row in enumerate(corpus):
        sid = row["id"]
        ref = row["reference"]
        ref_tokens = ref.split()
        difficulty = float(row.get("difficulty", 1.0))
        hypotheses = []
        seg_das = []
        seg_cats = []
        for p_index, pid in enumerate(provider_ids):
            rng = np.random.default_rng([cfg.seed, 101, seg_index, p_index])
            rate = provider_corruption_rate(p_index, cfg.n_providers, difficulty)
            text, cats = _corrupt(ref_tokens, rate, rng)
            da = min(100.0, max(0.0, 100.0 * (1.0 - ter_text(text, ref))))
            noise_rng = np.random.default_rng([cfg.seed, 131, seg_index, p_index])
            teacher = float(min(100.0, max(0.0, da + noise_rng.normal(0.0, 3.0))))
            hypotheses.append(
                Hypothesis(provider_id=pid, text=text, teacher_score=teacher, llm_score=da)
            )
            seg_das.append(da)
            seg_cats.append(cats)
        reference[sid] = ref
        das[sid] = seg_das
        categories[sid] = seg_cats
        best_idx[sid] = int(np.argmax(seg_das))
        hidden_refs[row["source_text"]] = ref
        segments.append(
            Segment(
                id=sid,
                source_text=row["source_text"],
                source_lang=row["source_lang"],
                target_lang=row["target_lang"],
                hypotheses=tuple(hypotheses),
                topic=row.get("topic"),
            )
        )

    split_rng = np.random.default_rng([cfg.seed, 151])
    order = split_rng.permutation(len(segments))
    n_holdout = max(1, int(round(len(segments) * cfg.holdout_fraction)))
    holdout_positions = set(int(i) for i in order[:n_holdout])
    train = [seg for i, seg in enumerate(segments) if i not in holdout_positions]
    holdout = [seg for i, seg in enumerate(segments) if i in holdout_positions]
    return SimEnvironment(
        train_segments=train,
        holdout_segments=holdout,
        reference=reference,
        das=das,
        categories=categories,
        best_idx=best_idx,
        hidden_refs=hidden_refs,
        provider_ids=provider_ids,
    )


# ---------------------------------------------------------------------------
# The loop
# ---------------------------------------------------------------------------


def _logical_clock():
    t = [0.0]

    def tick() -> float:
        t[0] += 1.0
        return t[0]

    return tick


@dataclass
class LoopResult:
    service: AnnotationService
    env: SimEnvironment
    learning_curve: list[dict]
    fraction_auto_curve: list[dict]
    improvement_pairs: list[tuple[float, float, str, str]]
    human_count: int
    reached_at: int | None


class _HoldoutEval:
    """Vectorized ranker accuracy on the held-out split.

    A prediction counts as a hit when the picked hypothesis attains the
    hidden best quality score, so ties between equally good hypotheses are
    not scored as errors.
    """

    def __init__(self, env: SimEnvironment, service: AnnotationService):
        matrices = []
        best_rows = []
        for seg in env.holdout_segments:
            fvs = [
                scale_features(
                    extract_surface(seg.source_text, h.text),
                    service.config.feature_scales,
                )
                for h in seg.hypotheses
            ]
            matrices.append(
                np.stack([np.append(np.asarray(fv.values), 1.0) for fv in fvs])
            )
            das = env.das[seg.id]
            best_rows.append([da == max(das) for da in das])
        self.block = np.stack(matrices)  # (n_seg, n_hyp, d+1)
        self.best_mask = np.asarray(best_rows, dtype=bool)

    def top1(self, ranker_weights: Sequence[float]) -> float:
        scores = self.block @ np.asarray(ranker_weights, dtype=np.float64)
        rows = np.arange(len(scores))
        return float(np.mean(self.best_mask[rows, np.argmax(scores, axis=1)]))

    def topk(self, ranker_weights: Sequence[float], k: int) -> float:
        scores = self.block @ np.asarray(ranker_weights, dtype=np.float64)
        order = np.argsort(-scores, axis=1, kind="stable")
        rows = np.arange(len(scores))[:, None]
        hits = self.best_mask[rows, order[:, : min(k, order.shape[1])]].any(axis=1)
        return float(np.mean(hits))


def _annotate_once(
    service: AnnotationService,
    env: SimEnvironment,
    cfg: SimulationConfig,
    rng: np.random.Generator,
    pairs: list[tuple[float, float, str, str]],
) -> bool:
    """One synthetic-annotator step. Returns False when the pool is empty."""
    from .errors import PoolEmpty

    if cfg.strategy == RANDOM_STRATEGY:
        candidates = sorted(
            seg.id
            for seg in service.state.segments.values()
            if seg.status.value in ("Pending", "Prioritized")
            and seg.id not in service._leases
        )
        if not candidates:
            return False
        sid = candidates[int(rng.integers(0, len(candidates)))]
        seg = service.lease_specific(sid, "sim")
    else:
        try:
            sample = service.get_next_sample("sim", Strategy(cfg.strategy))
        except PoolEmpty:
            return False
        seg = service.state.segments[sample["segment"]["id"]]

    das = env.das[seg.id]
    ranked = sorted(range(len(das)), key=lambda i: (-das[i], i))
    chosen = ranked[0]
    if len(ranked) > 1 and cfg.annotator_noise > 0 and rng.random() < cfg.annotator_noise:
        chosen = ranked[1]

    chosen_hyp = seg.hypotheses[chosen]
    ref = env.reference[seg.id]
    cats = env.categories[seg.id][chosen]
    if chosen_hyp.text == ref or not cats:
        annotation = Annotation(
            segment_id=seg.id,
            annotator_id="sim",
            chosen_provider_id=chosen_hyp.provider_id,
            error_categories=frozenset({ErrorCategory.NO_EDIT}),
            post_edit_text=None,
        )
        post_edit = chosen_hyp.text
        post_score = das[chosen]
    else:
        annotation = Annotation(
            segment_id=seg.id,
            annotator_id="sim",
            chosen_provider_id=chosen_hyp.provider_id,
            error_categories=cats,
            post_edit_text=ref,
        )
        post_edit = ref
        post_score = 100.0
    service.submit_annotation(annotation)

    pre = das[chosen]
    if pre > 0:
        pairs.append((pre, post_score, post_edit, ref))
    return True


def _run_loop(cfg: SimulationConfig, target_top1: float | None = None) -> LoopResult:
    problems = cfg.validate()
    if problems:
        if any("budget" in p for p in problems):
            raise BudgetZero("; ".join(problems))
        raise ValueError("; ".join(problems))

    corpus = (
        load_corpus(cfg.corpus_path)
        if cfg.corpus_path
        else generate_corpus(cfg.n_segments, cfg.seed)
    )
    env = build_environment(corpus, cfg)
    log = MemoryEventLog(clock=_logical_clock())
    judge = MockLlmJudge(env.hidden_refs)
    service = AnnotationService(
        log,
        judge,
        ServiceConfig(
            lease_ttl_seconds=1e9,
            hyperparams=Hyperparams(cfg.learning_rate, cfg.l2),
            annotators=("sim",),
        ),
        clock=_logical_clock(),
    )
    service.admin_set_threshold(cfg.tau)
    service.admin_set_weights(list(cfg.weights))
    for seg in env.train_segments:
        service.ingest_segment(seg)

    evaluator = _HoldoutEval(env, service)
    rng = np.random.default_rng([cfg.seed, 997])
    learning_curve: list[dict] = []
    fraction_curve: list[dict] = []
    pairs: list[tuple[float, float, str, str]] = []
    human_count = 0
    reached_at = None
    eval_every = 1 if target_top1 is not None else cfg.eval_every

    while human_count < cfg.budget:
        if not _annotate_once(service, env, cfg, rng, pairs):
            break
        human_count += 1
        if human_count % eval_every == 0 or human_count == cfg.budget:
            model = service.state.model
            top1 = evaluator.top1(model.ranker_weights) if model else 0.0
            learning_curve.append({"n_human": human_count, "holdout_top1": top1})
            fraction_curve.append(
                {"n_human": human_count, "fraction_auto": service.preview_fraction_auto()}
            )
            if target_top1 is not None and top1 >= target_top1 and reached_at is None:
                reached_at = human_count
                break

    return LoopResult(
        service=service,
        env=env,
        learning_curve=learning_curve,
        fraction_auto_curve=fraction_curve,
        improvement_pairs=pairs,
        human_count=human_count,
        reached_at=reached_at,
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def pseudo_label_precision(
    service: AnnotationService, env: SimEnvironment
) -> float | None:
    """Fraction of pseudo labels whose chosen hypothesis attains the hidden
    best quality score. Hidden-score ties count as agreement: picking an
    equally good hypothesis is not an error."""
    pseudo = [a for a in service.state.annotations if a.is_pseudo]
    if not pseudo:
        return None
    hits = 0
    for ann in pseudo:
        das = env.das[ann.segment_id]
        chosen_idx = env.provider_ids.index(ann.chosen_provider_id)
        if das[chosen_idx] == max(das):
            hits += 1
    return hits / len(pseudo)


def run_simulation(cfg: SimulationConfig, out_dir: str | Path | None = None) -> dict:
    """Full run: annotate up to the budget, pseudo-label the rest, aggregate."""
    result = _run_loop(cfg)
    service = result.service
    env = result.env

    auto = service.admin_auto_label()
    pseudo_precision = pseudo_label_precision(service, env)

    stats = service.get_admin_stats()
    model = service.state.model
    holdout = _HoldoutEval(env, service)
    topk = {
        "holdout_ranker": {
            "top1": holdout.top1(model.ranker_weights) if model else 0.0,
            "top3": holdout.topk(model.ranker_weights, 3) if model else 0.0,
        },
        "human_labeled": stats.topk,
    }

    improvement = None
    if result.improvement_pairs:
        from .metrics import improvement_stats

        improvement = improvement_stats(result.improvement_pairs).to_json_dict()

    report = {
        "config": {
            "corpus_path": cfg.corpus_path,
            "n_segments": cfg.n_segments,
            "n_providers": cfg.n_providers,
            "seed": cfg.seed,
            "annotator_noise": cfg.annotator_noise,
            "strategy": cfg.strategy,
            "tau": cfg.tau,
            "weights": list(cfg.weights),
            "budget": cfg.budget,
        },
        "human_annotations": result.human_count,
        "learning_curve": result.learning_curve,
        "fraction_auto_over_time": result.fraction_auto_curve,
        "pseudo": {
            "labeled_count": auto["labeled_count"],
            "fraction_auto": auto["fraction_auto"],
            "precision_vs_hidden_best": pseudo_precision,
        },
        "topk": topk,
        "correlation": stats.correlation.to_json_dict() if stats.correlation else None,
        "improvement": improvement,
        "admin_stats": stats.to_dict(),
    }

    if out_dir is not None:
        _write_report(report, result, Path(out_dir))
    return report


def _write_report(report: dict, result: LoopResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    write_events(result.service._log.read_all(), out_dir / "events.ndjson.log")

    with open(out_dir / "learning_curve.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n_human", "holdout_top1"])
        for point in report["learning_curve"]:
            writer.writerow([point["n_human"], point["holdout_top1"]])

    with open(out_dir / "fraction_auto.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n_human", "fraction_auto"])
        for point in report["fraction_auto_over_time"]:
            writer.writerow([point["n_human"], point["fraction_auto"]])

    with open(out_dir / "topk.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "top1", "top3"])
        ranker = report["topk"]["holdout_ranker"]
        writer.writerow(["holdout_ranker", ranker["top1"], ranker["top3"]])
        human = report["topk"]["human_labeled"] or {}
        for name in sorted(human):
            writer.writerow([name, human[name]["top1"], human[name]["top3"]])


def compare_strategies(
    cfg: SimulationConfig,
    strategies: Sequence[str],
    seeds: Sequence[int],
    target_top1: float = 0.8,
) -> dict:
    """Annotations needed per strategy to reach the target held-out top-1
    accuracy; unreachable cells are reported, not fatal."""
    if len(strategies) < 2:
        raise ValueError("need at least 2 strategies to compare")
    if len(seeds) < 3:
        raise ValueError("need at least 3 seeds")
    rows = []
    for strategy in strategies:
        per_seed: list[int | None] = []
        for seed in seeds:
            run_cfg = replace(cfg, strategy=strategy, seed=int(seed))
            result = _run_loop(run_cfg, target_top1=target_top1)
            per_seed.append(result.reached_at)
        reached = [n for n in per_seed if n is not None]
        mean = sum(reached) / len(reached) if reached else None
        std = (
            math.sqrt(sum((n - mean) ** 2 for n in reached) / len(reached))
            if reached
            else None
        )
        rows.append(
            {
                "strategy": strategy,
                "per_seed": per_seed,
                "mean_annotations": mean,
                "std_annotations": std,
                "unreachable": sum(1 for n in per_seed if n is None),
            }
        )
    return {"target_top1": target_top1, "seeds": [int(s) for s in seeds], "rows": rows}
