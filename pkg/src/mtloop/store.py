"""Event-sourced persistence.

Every mutation is an appended event; project state is a deterministic left
fold over the log. Log records are newline-delimited JSON, each prefixed by
the body's byte length and CRC32, so a torn tail from a crash is detected
and dropped while interior corruption fails loudly. Wall-clock timestamps
ride along for humans but never enter the state hash.
"""

from __future__ import annotations

import binascii
import errno
import hashlib
import json
import os
import time
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol

from .domain import (
    Annotation,
    Segment,
    SegmentStatus,
    ThresholdConfig,
    canonical_json,
    can_transition,
)
from .errors import CorruptLog, CorruptSnapshot, SerializationFailure, StorageFull
from .learner import ModelState


class EventKind(str, Enum):
    SEGMENT_INGESTED = "SegmentIngested"
    HYPOTHESIS_ATTACHED = "HypothesisAttached"
    SCORES_ATTACHED = "ScoresAttached"
    ANNOTATION_SUBMITTED = "AnnotationSubmitted"
    PSEUDO_LABELED = "PseudoLabeled"
    MODEL_UPDATED = "ModelUpdated"
    THRESHOLD_CHANGED = "ThresholdChanged"
    WEIGHTS_CHANGED = "WeightsChanged"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: EventKind
    payload: dict
    at: float  # wall clock, informational only

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind.value,
            "payload": self.payload,
            "at": self.at,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Event":
        return cls(
            seq=data["seq"],
            kind=EventKind(data["kind"]),
            payload=data["payload"],
            at=data["at"],
        )


_REQUIRED_PAYLOAD_KEYS: dict[EventKind, set[str]] = {
    EventKind.SEGMENT_INGESTED: {"segment"},
    EventKind.HYPOTHESIS_ATTACHED: {"segment_id", "hypothesis"},
    EventKind.SCORES_ATTACHED: {"segment_id", "provider_id"},
    EventKind.ANNOTATION_SUBMITTED: {"annotation"},
    EventKind.PSEUDO_LABELED: {"annotation"},
    EventKind.MODEL_UPDATED: {"model"},
    EventKind.THRESHOLD_CHANGED: {"tau"},
    EventKind.WEIGHTS_CHANGED: {"weights"},
}

_SCORE_FIELDS = ("teacher_score", "llm_score", "predicted_quality", "predicted_ter")


def validate_payload(kind: EventKind, payload: dict) -> None:
    """Schema check per event kind; raises SerializationFailure."""
    if not isinstance(payload, dict):
        raise SerializationFailure(f"payload for {kind.value} must be an object")
    missing = _REQUIRED_PAYLOAD_KEYS[kind] - payload.keys()
    if missing:
        raise SerializationFailure(
            f"payload for {kind.value} missing keys {sorted(missing)}"
        )
    try:
        if kind is EventKind.SEGMENT_INGESTED:
            Segment.from_dict(payload["segment"])
        elif kind is EventKind.HYPOTHESIS_ATTACHED:
            from .domain import Hypothesis

            Hypothesis.from_dict(payload["hypothesis"])
        elif kind in (EventKind.ANNOTATION_SUBMITTED, EventKind.PSEUDO_LABELED):
            Annotation.from_dict(payload["annotation"])
        elif kind is EventKind.MODEL_UPDATED:
            ModelState.from_dict(payload["model"])
        elif kind is EventKind.THRESHOLD_CHANGED:
            if not 0.0 <= float(payload["tau"]) <= 1.0:
                raise ValueError(f"tau {payload['tau']} outside [0, 1]")
        elif kind is EventKind.WEIGHTS_CHANGED:
            cfg = ThresholdConfig(weights=tuple(payload["weights"]))
            problems = [v for v in cfg.validate() if "weights" in v]
            if problems:
                raise ValueError("; ".join(problems))
    except SerializationFailure:
        raise
    except Exception as exc:
        raise SerializationFailure(f"invalid {kind.value} payload: {exc}") from exc


# ---------------------------------------------------------------------------
# Logs
# ---------------------------------------------------------------------------


class EventSink(Protocol):
    def append(self, kind: EventKind, payload: dict) -> Event: ...

    def read_all(self) -> list[Event]: ...


class MemoryEventLog:
    """In-memory log with the same contract as the file-backed one."""

    def __init__(self, clock: Callable[[], float] = time.time):
        self._events: list[Event] = []
        self._clock = clock

    def append(self, kind: EventKind, payload: dict) -> Event:
        validate_payload(kind, payload)
        event = Event(
            seq=len(self._events) + 1, kind=kind, payload=payload, at=self._clock()
        )
        self._events.append(event)
        return event

    def read_all(self) -> list[Event]:
        return list(self._events)


def _frame(body: str) -> bytes:
    raw = body.encode("utf-8")
    crc = binascii.crc32(raw) & 0xFFFFFFFF
    return f"{len(raw)} {crc:08x} ".encode("ascii") + raw + b"\n"


def _parse_record(line: bytes) -> dict:
    parts = line.split(b" ", 2)
    if len(parts) != 3:
        raise ValueError("record lacks length/crc prefix")
    length = int(parts[0])
    crc_expected = int(parts[1], 16)
    body = parts[2]
    if len(body) != length:
        raise ValueError(f"length prefix {length} != body length {len(body)}")
    if binascii.crc32(body) & 0xFFFFFFFF != crc_expected:
        raise ValueError("CRC mismatch")
    return json.loads(body.decode("utf-8"))


class EventLog:
    """Append-only file log: `<len> <crc32> <json>` per line.

    Opening scans the file; a torn final record (interrupted append) is
    truncated away, while a bad record followed by valid data raises
    CorruptLog. Appends are flushed and fsynced so a record is either fully
    on disk or absent.
    """

    def __init__(self, path: str | Path, clock: Callable[[], float] = time.time):
        self.path = Path(path)
        self._clock = clock
        self._events = self._scan_and_recover()

    @property
    def last_seq(self) -> int:
        return self._events[-1].seq if self._events else 0

    def _scan_and_recover(self) -> list[Event]:
        if not self.path.exists():
            return []
        events: list[Event] = []
        valid_bytes = 0
        with open(self.path, "rb") as fh:
            lines = fh.read().split(b"\n")
        # split() leaves a final empty chunk when the file ends with \n
        for i, line in enumerate(lines):
            if line == b"" and i == len(lines) - 1:
                break
            expected = len(events) + 1
            try:
                record = _parse_record(line)
                event = Event.from_dict(record)
                if event.seq != expected:
                    raise ValueError(f"seq {event.seq}, expected {expected}")
            except Exception as exc:
                trailing = any(chunk for chunk in lines[i + 1 :])
                if trailing:
                    raise CorruptLog(expected, f"bad record at seq {expected}: {exc}")
                # torn tail from a crashed append: drop it
                with open(self.path, "r+b") as fh:
                    fh.truncate(valid_bytes)
                break
            events.append(event)
            valid_bytes += len(line) + 1
        return events

    def append(self, kind: EventKind, payload: dict) -> Event:
        validate_payload(kind, payload)
        event = Event(
            seq=self.last_seq + 1, kind=kind, payload=payload, at=self._clock()
        )
        frame = _frame(canonical_json(event.to_dict()))
        try:
            with open(self.path, "ab") as fh:
                fh.write(frame)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull(str(exc)) from exc
            raise
        self._events.append(event)
        return event

    def read_all(self) -> list[Event]:
        return list(self._events)


def write_events(events: Iterable[Event], path: str | Path) -> None:
    """Write a complete framed log in one pass (e.g. when persisting an
    in-memory log after a simulation)."""
    with open(path, "wb") as fh:
        for event in events:
            fh.write(_frame(canonical_json(event.to_dict())))


def read_log(path: str | Path) -> list[Event]:
    """Strict read for replay: any malformed record or seq gap raises
    CorruptLog, including a torn tail."""
    events: list[Event] = []
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n")
    for i, line in enumerate(lines):
        if line == b"" and i == len(lines) - 1:
            break
        expected = len(events) + 1
        try:
            record = _parse_record(line)
            event = Event.from_dict(record)
            if event.seq != expected:
                raise ValueError(f"seq {event.seq}, expected {expected}")
        except Exception as exc:
            raise CorruptLog(expected, f"bad record at seq {expected}: {exc}")
        events.append(event)
    return events


# ---------------------------------------------------------------------------
# Project state and replay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectState:
    segments: dict[str, Segment]
    annotations: tuple[Annotation, ...]
    model: ModelState | None
    config: ThresholdConfig
    last_seq: int

    @classmethod
    def empty(cls) -> "ProjectState":
        return cls(
            segments={},
            annotations=(),
            model=None,
            config=ThresholdConfig(),
            last_seq=0,
        )

    def to_dict(self) -> dict:
        return {
            "segments": {sid: seg.to_dict() for sid, seg in self.segments.items()},
            "annotations": [a.to_dict() for a in self.annotations],
            "model": self.model.to_dict() if self.model else None,
            "config": self.config.to_dict(),
            "last_seq": self.last_seq,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ProjectState":
        return cls(
            segments={
                sid: Segment.from_dict(seg) for sid, seg in data["segments"].items()
            },
            annotations=tuple(Annotation.from_dict(a) for a in data["annotations"]),
            model=ModelState.from_dict(data["model"]) if data["model"] else None,
            config=ThresholdConfig.from_dict(data["config"]),
            last_seq=data["last_seq"],
        )


def state_hash(state: ProjectState) -> str:
    return hashlib.sha256(canonical_json(state.to_dict()).encode("utf-8")).hexdigest()


def _transition_if_forward(seg: Segment, to: SegmentStatus) -> Segment:
    return replace(seg, status=to) if can_transition(seg.status, to) else seg


def apply_event(state: ProjectState, event: Event) -> ProjectState:
    segments = state.segments
    annotations = state.annotations
    model = state.model
    config = state.config
    payload = event.payload

    if event.kind is EventKind.SEGMENT_INGESTED:
        seg = Segment.from_dict(payload["segment"])
        segments = {**segments, seg.id: seg}
    elif event.kind is EventKind.HYPOTHESIS_ATTACHED:
        from .domain import Hypothesis

        seg = segments[payload["segment_id"]]
        hyp = Hypothesis.from_dict(payload["hypothesis"])
        segments = {
            **segments,
            seg.id: replace(seg, hypotheses=seg.hypotheses + (hyp,)),
        }
    elif event.kind is EventKind.SCORES_ATTACHED:
        seg = segments[payload["segment_id"]]
        updated = tuple(
            replace(
                hyp,
                **{
                    field: payload[field]
                    for field in _SCORE_FIELDS
                    if field in payload
                },
            )
            if hyp.provider_id == payload["provider_id"]
            else hyp
            for hyp in seg.hypotheses
        )
        segments = {**segments, seg.id: replace(seg, hypotheses=updated)}
    elif event.kind is EventKind.ANNOTATION_SUBMITTED:
        ann = replace(
            Annotation.from_dict(payload["annotation"]), timestamp=event.seq
        )
        annotations = annotations + (ann,)
        seg = segments[ann.segment_id]
        segments = {
            **segments,
            seg.id: _transition_if_forward(seg, SegmentStatus.HUMAN_LABELED),
        }
    elif event.kind is EventKind.PSEUDO_LABELED:
        ann = replace(
            Annotation.from_dict(payload["annotation"]), timestamp=event.seq
        )
        annotations = annotations + (ann,)
        seg = segments[ann.segment_id]
        segments = {
            **segments,
            seg.id: _transition_if_forward(seg, SegmentStatus.AUTO_LABELED),
        }
    elif event.kind is EventKind.MODEL_UPDATED:
        model = ModelState.from_dict(payload["model"])
    elif event.kind is EventKind.THRESHOLD_CHANGED:
        config = replace(config, tau=float(payload["tau"]))
    elif event.kind is EventKind.WEIGHTS_CHANGED:
        config = replace(config, weights=tuple(payload["weights"]))

    return ProjectState(
        segments=segments,
        annotations=annotations,
        model=model,
        config=config,
        last_seq=event.seq,
    )


def replay(
    events: Iterable[Event], initial: ProjectState | None = None
) -> ProjectState:
    """Deterministic left fold; the same log always folds to the same state
    hash. Seq integrity is enforced against the initial state."""
    state = initial if initial is not None else ProjectState.empty()
    expected = state.last_seq + 1
    for event in events:
        if event.seq != expected:
            raise CorruptLog(expected, f"gap: got seq {event.seq}, expected {expected}")
        try:
            state = apply_event(state, event)
        except Exception as exc:
            raise CorruptLog(event.seq, f"unapplicable event at seq {event.seq}: {exc}")
        expected += 1
    return state


# ---------------------------------------------------------------------------
# Snapshots
# ---------------------------------------------------------------------------


def snapshot(state: ProjectState, path: str | Path) -> None:
    body = canonical_json(state.to_dict())
    checksum = hashlib.sha256(body.encode("utf-8")).hexdigest()
    Path(path).write_text(
        json.dumps({"checksum": checksum, "state": json.loads(body)}), encoding="utf-8"
    )


def load_snapshot(path: str | Path) -> ProjectState:
    try:
        wrapper = json.loads(Path(path).read_text(encoding="utf-8"))
        body = canonical_json(wrapper["state"])
        if hashlib.sha256(body.encode("utf-8")).hexdigest() != wrapper["checksum"]:
            raise ValueError("checksum mismatch")
        return ProjectState.from_dict(wrapper["state"])
    except CorruptSnapshot:
        raise
    except Exception as exc:
        raise CorruptSnapshot(f"cannot load snapshot {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Corpus export
# ---------------------------------------------------------------------------


def latest_annotations(state: ProjectState) -> dict[str, Annotation]:
    """Latest annotation per segment; human labels shadow pseudo ones."""
    latest: dict[str, Annotation] = {}
    for ann in state.annotations:
        current = latest.get(ann.segment_id)
        if current is None or (current.is_pseudo and not ann.is_pseudo) or (
            current.is_pseudo == ann.is_pseudo and ann.timestamp >= current.timestamp
        ):
            latest[ann.segment_id] = ann
    return latest


def export_corpus_rows(state: ProjectState) -> list[dict]:
    """One row per labeled segment, ordered by segment id."""
    rows = []
    latest = latest_annotations(state)
    for seg in sorted(state.segments.values(), key=lambda s: s.id):
        ann = latest.get(seg.id)
        if ann is None:
            continue
        chosen = seg.hypothesis_by_provider(ann.chosen_provider_id)
        if chosen is None:
            continue
        rows.append(
            {
                "source": seg.source_text,
                "best_translation": chosen.text,
                "post_edit": ann.post_edit_text or chosen.text,
                "source_lang": seg.source_lang,
                "target_lang": seg.target_lang,
                "provenance": "pseudo" if ann.is_pseudo else "human",
            }
        )
    return rows


def export_corpus(state: ProjectState, path: str | Path) -> int:
    rows = export_corpus_rows(state)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(canonical_json(row) + "\n")
    return len(rows)
