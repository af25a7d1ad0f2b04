"""REST classification service: anonymize, classify, review.

Stateless apart from the submission store; two instances over the same
model directory return identical predictions. Raw complaint text is never
persisted when privacy_mode is on (the default): anonymize first, store
the redacted form only.
"""

from __future__ import annotations

import csv
import io
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import classifiers
from .anonymizer import NormalizationConfig, PatternRecognizer, normalize, redact
from .storage import Submission, SubmissionStore, new_submission_id


@dataclass
class ServiceConfig:
    model_dir: Optional[str] = None
    storage_path: str = "submissions.jsonl"
    privacy_mode: bool = True
    auth_tokens: list[str] = field(default_factory=list)
    audit_tokens: list[str] = field(default_factory=list)
    max_body_bytes: int = 64 * 1024
    persist_submissions: bool = True
    host: str = "127.0.0.1"
    port: int = 8000


class ClassifyRequest(BaseModel):
    text: str


class AnonymizeRequest(BaseModel):
    text: str


class ReviewRequest(BaseModel):
    corrected_label: str


def _error(status: int, code: str, message: str, detail: Optional[str] = None):
    body = {"code": code, "message": message}
    if detail:
        body["detail"] = detail
    return HTTPException(status_code=status, detail=body)


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="crimecat", version="1")
    state = {
        "model": None,
        "started_at": time.time(),
        "store": SubmissionStore(config.storage_path) if config.persist_submissions else None,
    }
    recognizer = PatternRecognizer()
    inference_lock = threading.Lock()  # single CPU model; serialize inference

    if config.model_dir:
        try:
            state["model"] = classifiers.load(config.model_dir)
        except Exception:
            state["model"] = None  # health reports degraded; classify returns 503

    def require_token(authorization: Optional[str] = Header(default=None)) -> Optional[str]:
        if not config.auth_tokens:
            return None
        if not authorization or not authorization.startswith("Bearer "):
            raise _error(401, "unauthorized", "missing bearer token")
        token = authorization.removeprefix("Bearer ")
        if token not in config.auth_tokens and token not in config.audit_tokens:
            raise _error(401, "unauthorized", "bad token")
        return token

    @app.exception_handler(HTTPException)
    async def handle_http_error(request: Request, exc: HTTPException):
        detail = exc.detail if isinstance(exc.detail, dict) else {"code": "error", "message": str(exc.detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > config.max_body_bytes:
            return JSONResponse(
                status_code=413,
                content={"code": "payload_too_large", "message": f"body exceeds {config.max_body_bytes} bytes"},
            )
        return await call_next(request)

    def _anonymize(text: str, want_spans: bool):
        result = redact(text, audit_mode=want_spans, recognizer=recognizer)
        return result

    @app.post("/api/v1/classify")
    def classify(req: ClassifyRequest, token: Optional[str] = Depends(require_token)):
        if not req.text.strip():
            raise _error(400, "empty_text", "text must be non-empty")
        model = state["model"]
        if model is None:
            raise _error(503, "model_not_loaded", "no model loaded")
        redaction = _anonymize(req.text, want_spans=False)
        # models are trained on normalized text; mirror that at inference
        model_input = normalize(redaction.text, NormalizationConfig()) or redaction.text
        with inference_lock:
            prediction = classifiers.predict(model, model_input)
        if state["store"] is not None:
            sub = Submission(
                id=new_submission_id(),
                received_at=time.time(),
                anonymized_text=redaction.text,
                prediction_label=prediction.label,
                prediction_scores=prediction.scores,
                model_fingerprint=prediction.model_fingerprint,
            )
            state["store"].add(sub)
            submission_id = sub.id
        else:
            submission_id = None
        return {
            "prediction": {"label": prediction.label, "scores": prediction.scores},
            "anonymized_text": redaction.text,
            "model_fingerprint": prediction.model_fingerprint,
            "submission_id": submission_id,
        }

    @app.post("/api/v1/anonymize")
    def anonymize(req: AnonymizeRequest, token: Optional[str] = Depends(require_token)):
        if not req.text.strip():
            raise _error(400, "empty_text", "text must be non-empty")
        has_audit_scope = (not config.privacy_mode) or (token is not None and token in config.audit_tokens)
        result = _anonymize(req.text, want_spans=has_audit_scope)
        body = {"anonymized_text": result.text}
        if has_audit_scope:
            body["spans"] = [
                {"start": s.start, "end": s.end, "kind": s.kind, "surface": s.surface}
                for s in result.spans
            ]
        return body

    @app.get("/api/v1/submissions")
    def list_submissions(
        limit: int = Query(default=50, ge=1, le=500),
        offset: int = Query(default=0, ge=0),
        token: Optional[str] = Depends(require_token),
    ):
        store = state["store"]
        if store is None:
            raise _error(503, "persistence_disabled", "submission store is disabled")
        items, total = store.list(limit=limit, offset=offset)
        return {
            "total": total,
            "limit": limit,
            "offset": offset,
            "items": [
                {
                    "id": s.id,
                    "received_at": s.received_at,
                    "updated_at": s.updated_at,
                    "anonymized_text": s.anonymized_text,
                    "prediction": {"label": s.prediction_label, "scores": s.prediction_scores},
                    "status": s.status,
                    "operator_feedback": s.operator_feedback,
                }
                for s in items
            ],
        }

    @app.post("/api/v1/submissions/{submission_id}/review")
    def review(submission_id: str, req: ReviewRequest, token: Optional[str] = Depends(require_token)):
        store = state["store"]
        if store is None:
            raise _error(503, "persistence_disabled", "submission store is disabled")
        model = state["model"]
        valid_labels = set(model.label_order) if model else None
        if valid_labels is not None and req.corrected_label not in valid_labels:
            raise _error(422, "invalid_label", f"label {req.corrected_label!r} outside the category set")
        sub = store.review(submission_id, req.corrected_label)
        if sub is None:
            raise _error(404, "not_found", f"no submission {submission_id}")
        return {
            "id": sub.id,
            "status": sub.status,
            "operator_feedback": sub.operator_feedback,
            "updated_at": sub.updated_at,
        }

    @app.get("/api/v1/submissions/export")
    def export_reviewed(token: Optional[str] = Depends(require_token)):
        """Reviewed submissions as a retraining corpus in the ingest format."""
        store = state["store"]
        if store is None:
            raise _error(503, "persistence_disabled", "submission store is disabled")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["text", "category"])
        for sub in store.reviewed():
            writer.writerow([sub.anonymized_text, sub.operator_feedback])
        return PlainTextResponse(buf.getvalue(), media_type="text/csv")

    @app.get("/api/v1/health")
    def health():
        model = state["model"]
        return {
            "status": "ok" if model is not None else "degraded",
            "model_fingerprint": model.fingerprint if model else None,
            "uptime_seconds": time.time() - state["started_at"],
            "privacy_mode": config.privacy_mode,
        }

    @app.get("/api/v1/models")
    def models():
        entries = []
        if config.model_dir:
            base = Path(config.model_dir)
            candidates = [base] if (base / "metadata.json").exists() else sorted(base.glob("*/"))
            for path in candidates:
                meta = path / "metadata.json"
                if meta.exists():
                    import json as _json

                    data = _json.loads(meta.read_text(encoding="utf-8"))
                    entries.append(
                        {
                            "path": str(path),
                            "model_id": data.get("spec", {}).get("model_id"),
                            "label_order": data.get("label_order"),
                            "fingerprint": data.get("fingerprint"),
                        }
                    )
        loaded = state["model"]
        return {
            "loaded_fingerprint": loaded.fingerprint if loaded else None,
            "label_order": loaded.label_order if loaded else None,
            "checkpoints": entries,
        }

    app.state.config = config
    app.state.runtime = state
    return app
