"""HTTP surface for the engine: dataset upload, turns, sessions, artifacts.

Error payloads are always {"code", "message"} with a user-facing message,
never a stack trace. Turn handling is synchronous: the response carries
the decision, the generated code when the code path ran, the artifact
reference or narration, and per-stage timings.
"""

from __future__ import annotations

import base64
import binascii
import logging

from fastapi import FastAPI, File, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialogue import TurnFailed, TurnRecord
from .engine import Engine, UnknownDataset, UnknownSession
from .profiling import Unparseable
from .speech import AudioClip, EmptyAudio

log = logging.getLogger(__name__)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class TurnBody(BaseModel):
    text: str | None = None
    audio_base64: str | None = None
    audio_format: str = "wav"
    want_audio: bool = False


class SessionBody(BaseModel):
    dataset_id: str
    memory_capacity: int | None = None


def turn_view(record: TurnRecord) -> dict:
    """The API projection of a TurnRecord; figure bytes live behind /artifacts."""
    return record.to_dict(include_figure_payload=False)


def create_app(engine: Engine, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="tabchat", version="0.1.0")
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(Exception)
    async def _internal_error(_request: Request, exc: Exception):
        log.exception("unhandled error: %s", exc)
        return JSONResponse(
            status_code=500,
            content={"code": "internal", "message": "internal engine error"},
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile = File(...)):
        content = await file.read()
        try:
            profile = engine.upload_dataset(content, file.filename or "dataset")
        except Unparseable as exc:
            raise ApiError(422, "unparseable_dataset", str(exc)) from exc
        return {"dataset_id": profile.dataset_id, "profile": profile.to_dict()}

    @app.post("/sessions")
    def create_session(body: SessionBody):
        try:
            session_id = engine.create_session(body.dataset_id, body.memory_capacity)
        except UnknownDataset as exc:
            raise ApiError(404, "not_found", f"unknown dataset {body.dataset_id}") from exc
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnBody):
        audio = None
        if body.audio_base64:
            try:
                data = base64.b64decode(body.audio_base64, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise ApiError(400, "bad_request", "audio_base64 is not valid Base64") from exc
            audio = AudioClip(data=data, format=body.audio_format)
        if audio is None and (body.text is None):
            raise ApiError(400, "bad_request", "provide text or audio_base64")
        try:
            record = engine.handle_turn(
                session_id, text=body.text, audio=audio, want_audio=body.want_audio
            )
        except UnknownSession as exc:
            raise ApiError(404, "not_found", f"unknown session {session_id}") from exc
        except EmptyAudio as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        except TurnFailed as exc:
            raise ApiError(
                503 if exc.retryable else 500,
                "gateway_unavailable" if exc.retryable else "internal",
                str(exc),
            ) from exc
        return turn_view(record)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            session = engine.get_session(session_id)
        except UnknownSession as exc:
            raise ApiError(404, "not_found", f"unknown session {session_id}") from exc
        return {
            "session_id": session.session_id,
            "dataset_id": session.dataset_id,
            "memory_capacity": session.memory_capacity,
            "turns": [turn_view(r) for r in session.history],
        }

    @app.get("/artifacts/{artifact_id}")
    def get_artifact(artifact_id: str):
        try:
            data, media_type = engine.store.load_artifact(artifact_id)
        except KeyError as exc:
            raise ApiError(404, "not_found", f"unknown artifact {artifact_id}") from exc
        return Response(content=data, media_type=media_type)

    return app
