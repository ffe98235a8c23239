"""Exception types shared across modules.

Every error the HTTP layer maps to a status code lives here so the mapping
stays in one place; module-internal helpers raise these directly.
"""

from __future__ import annotations


class MtLoopError(Exception):
    """Base class for all package errors."""

    code = "internal_error"


class ValidationFailure(MtLoopError):
    code = "validation_failure"

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class IllegalTransition(MtLoopError):
    code = "illegal_transition"

    def __init__(self, from_status: str, to_status: str):
        super().__init__(f"illegal status transition {from_status} -> {to_status}")
        self.from_status = from_status
        self.to_status = to_status


class EmptyReference(MtLoopError):
    code = "empty_reference"


class LengthMismatch(MtLoopError):
    code = "length_mismatch"


class DegenerateInput(MtLoopError):
    code = "degenerate_input"


class EmptyInput(MtLoopError):
    code = "empty_input"


class KOutOfRange(MtLoopError):
    code = "k_out_of_range"


class NonPositivePreScore(MtLoopError):
    code = "non_positive_pre_score"


class DimensionMismatch(MtLoopError):
    code = "dimension_mismatch"


class SchemaMismatch(MtLoopError):
    code = "schema_mismatch"


class IndexOutOfRange(MtLoopError):
    code = "index_out_of_range"


class InsufficientHistory(MtLoopError):
    code = "insufficient_history"


class EmptyPool(MtLoopError):
    code = "empty_pool"


class ProviderTimeout(MtLoopError):
    code = "provider_timeout"


class ProviderError(MtLoopError):
    code = "provider_error"

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"provider returned status {status}")
        self.status = status


class MalformedResponse(MtLoopError):
    code = "malformed_response"


class UnparseableScore(MtLoopError):
    code = "unparseable_score"


class IndexParseFailure(MtLoopError):
    code = "index_parse_failure"


class StorageFull(MtLoopError):
    code = "storage_full"


class SerializationFailure(MtLoopError):
    code = "serialization_failure"


class CorruptLog(MtLoopError):
    code = "corrupt_log"

    def __init__(self, seq: int, message: str = ""):
        super().__init__(message or f"corrupt log record at seq {seq}")
        self.seq = seq


class CorruptSnapshot(MtLoopError):
    code = "corrupt_snapshot"


class PoolEmpty(MtLoopError):
    code = "pool_empty"


class UnknownAnnotator(MtLoopError):
    code = "unknown_annotator"


class LeaseExpired(MtLoopError):
    code = "lease_expired"


class StaleSegment(MtLoopError):
    code = "stale_segment"


class OutOfRange(MtLoopError):
    code = "out_of_range"


class CorpusParseError(MtLoopError):
    code = "corpus_parse_error"


class BudgetZero(MtLoopError):
    code = "budget_zero"


class TargetUnreachable(MtLoopError):
    code = "target_unreachable"
