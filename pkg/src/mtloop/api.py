"""HTTP surface: JSON over HTTP under /api/v1, errors as {code, message}.

The app is a thin adapter over AnnotationService; every number it serves
comes from the service so the browser UI can stay logic-free. A static
bundle directory, when configured, is mounted at /app.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .domain import Annotation, ErrorCategory, Segment, canonical_json
from .errors import (
    CorruptLog,
    CorruptSnapshot,
    LeaseExpired,
    MalformedResponse,
    MtLoopError,
    OutOfRange,
    PoolEmpty,
    ProviderError,
    ProviderTimeout,
    StaleSegment,
    UnknownAnnotator,
    ValidationFailure,
)
from .scheduler import Strategy
from .service import AnnotationService
from .store import export_corpus_rows

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (PoolEmpty, 204),
    (ValidationFailure, 400),
    (OutOfRange, 400),
    (UnknownAnnotator, 404),
    (LeaseExpired, 409),
    (StaleSegment, 409),
    (ProviderTimeout, 504),
    (ProviderError, 502),
    (MalformedResponse, 502),
    (CorruptLog, 500),
    (CorruptSnapshot, 500),
]


def _status_for(exc: MtLoopError) -> int:
    for etype, status in _STATUS_BY_ERROR:
        if isinstance(exc, etype):
            return status
    return 400


class AnnotationBody(BaseModel):
    segment_id: str
    annotator_id: str
    chosen_provider_id: str
    error_categories: list[str] = Field(default_factory=list)
    post_edit_text: str | None = None

    def to_annotation(self) -> Annotation:
        return Annotation(
            segment_id=self.segment_id,
            annotator_id=self.annotator_id,
            chosen_provider_id=self.chosen_provider_id,
            error_categories=frozenset(
                ErrorCategory(c) for c in self.error_categories
            ),
            post_edit_text=self.post_edit_text,
            is_pseudo=False,
        )


class ThresholdBody(BaseModel):
    tau: float


class WeightsBody(BaseModel):
    weights: list[float]


def create_app(service: AnnotationService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="mtloop", docs_url=None, redoc_url=None)

    def require_auth(request: Request) -> None:
        token = service.config.auth_token
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise PermissionError("invalid bearer token")

    @app.exception_handler(MtLoopError)
    async def mtloop_error_handler(request: Request, exc: MtLoopError):
        status = _status_for(exc)
        if status == 204:
            return Response(status_code=204)
        return JSONResponse(
            status_code=status, content={"code": exc.code, "message": str(exc)}
        )

    @app.exception_handler(PermissionError)
    async def auth_error_handler(request: Request, exc: PermissionError):
        return JSONResponse(
            status_code=401, content={"code": "unauthorized", "message": str(exc)}
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc)}
        )

    @app.get("/api/v1/segments/next", dependencies=[Depends(require_auth)])
    def get_next_segment(
        annotator: str = Query(...),
        strategy: str = Query(Strategy.TRIPARTITE.value),
    ):
        return service.get_next_sample(annotator, Strategy(strategy))

    @app.post("/api/v1/segments", status_code=201, dependencies=[Depends(require_auth)])
    def ingest_segment(body: dict):
        segment = Segment.from_dict(body)
        service.ingest_segment(segment)
        return {"ingested": segment.id}

    @app.post("/api/v1/annotations", dependencies=[Depends(require_auth)])
    def submit_annotation(body: AnnotationBody):
        receipt = service.submit_annotation(body.to_annotation())
        return receipt.to_dict()

    @app.get("/api/v1/admin/stats", dependencies=[Depends(require_auth)])
    def admin_stats():
        return service.get_admin_stats().to_dict()

    @app.put("/api/v1/admin/threshold", dependencies=[Depends(require_auth)])
    def set_threshold(body: ThresholdBody):
        service.admin_set_threshold(body.tau)
        return {"tau": body.tau}

    @app.put("/api/v1/admin/weights", dependencies=[Depends(require_auth)])
    def set_weights(body: WeightsBody):
        service.admin_set_weights(body.weights)
        return {"weights": body.weights}

    @app.post("/api/v1/admin/auto-label", dependencies=[Depends(require_auth)])
    def auto_label():
        return service.admin_auto_label()

    @app.get("/api/v1/admin/segments", dependencies=[Depends(require_auth)])
    def segment_histograms(rated: bool = Query(...)):
        return service.get_segment_histograms(rated)

    @app.get("/api/v1/admin/annotators", dependencies=[Depends(require_auth)])
    def annotators():
        return service.get_annotators()

    @app.get("/api/v1/export/corpus", dependencies=[Depends(require_auth)])
    def export_corpus():
        rows = export_corpus_rows(service.state)

        def stream():
            for row in rows:
                yield canonical_json(row) + "\n"

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app
