"""Newline-delimited JSON wire protocol between supervisor and worker.

Frames (one JSON object per line, UTF-8, "\n"-terminated):

  load request   {"op": "load", "path": str, "binding": "df"}
  load ack       {"status": "ok", "guards": {...}} | {"status": "error", "error": str}
  exec request   {"id": str, "op": "exec", "code": str, "timeout_ms": int}
  exec response  {"id": str, "status": str, "kind": str|null, "payload": value|null,
                  "axes": {"title","x_label","y_label"}|null, "error": str|null,
                  "duration_ms": int}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .policy import SandboxPolicy

STATUSES = (
    "ok",
    "blocked_import",
    "runtime_error",
    "timeout",
    "resource_limit",
    "protocol_error",
)
KINDS = ("figure", "table", "scalar", "text")
AXES_KEYS = ("title", "x_label", "y_label")


class FrameError(ValueError):
    """A wire frame is structurally malformed."""


@dataclass
class ExecutionResult:
    status: str
    kind: str | None = None
    payload: object = None
    axes: dict | None = None
    error_summary: str | None = None
    duration: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if (self.status == "ok") != (self.kind is not None):
            raise ValueError("kind must be present exactly when status is ok")
        if self.kind is not None and self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "kind": self.kind,
            "payload": self.payload,
            "axes": dict(self.axes) if self.axes is not None else None,
            "error_summary": self.error_summary,
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExecutionResult":
        return cls(
            status=doc["status"],
            kind=doc.get("kind"),
            payload=doc.get("payload"),
            axes=doc.get("axes"),
            error_summary=doc.get("error_summary"),
            duration=float(doc.get("duration", 0.0)),
        )


def _frame(doc: dict) -> bytes:
    return (json.dumps(doc, ensure_ascii=True) + "\n").encode("utf-8")


def encode_load(path: str, binding: str = "df") -> bytes:
    return _frame({"op": "load", "path": path, "binding": binding})


def encode_request(request_id: str, snippet: str, policy: SandboxPolicy) -> bytes:
    return _frame(
        {
            "id": request_id,
            "op": "exec",
            "code": snippet,
            "timeout_ms": int(policy.timeout * 1000),
        }
    )


def decode_request(line: bytes | str) -> dict:
    doc = _parse_line(line)
    op = doc.get("op")
    if op == "load":
        if not isinstance(doc.get("path"), str) or not isinstance(
            doc.get("binding"), str
        ):
            raise FrameError("load frame needs string path and binding")
        return doc
    if op == "exec":
        if not isinstance(doc.get("id"), str):
            raise FrameError("exec frame needs a string id")
        if not isinstance(doc.get("code"), str):
            raise FrameError("exec frame needs string code")
        if not isinstance(doc.get("timeout_ms"), int) or doc["timeout_ms"] <= 0:
            raise FrameError("exec frame needs positive integer timeout_ms")
        return doc
    raise FrameError(f"unknown op {op!r}")


def encode_response(request_id: str, result: ExecutionResult) -> bytes:
    return _frame(
        {
            "id": request_id,
            "status": result.status,
            "kind": result.kind,
            "payload": result.payload,
            "axes": dict(result.axes) if result.axes is not None else None,
            "error": result.error_summary,
            "duration_ms": int(round(result.duration * 1000)),
        }
    )


def decode_response(line: bytes | str) -> tuple[str, ExecutionResult]:
    doc = _parse_line(line)
    request_id = doc.get("id")
    if not isinstance(request_id, str):
        raise FrameError("response frame needs a string id")
    status = doc.get("status")
    if status not in STATUSES:
        raise FrameError(f"unknown status {status!r}")
    kind = doc.get("kind")
    if kind is not None and kind not in KINDS:
        raise FrameError(f"unknown kind {kind!r}")
    if (status == "ok") != (kind is not None):
        raise FrameError("kind must accompany status ok and nothing else")
    axes = doc.get("axes")
    if axes is not None:
        if not isinstance(axes, dict) or set(axes) - set(AXES_KEYS):
            raise FrameError("axes must hold only title/x_label/y_label")
        if not all(isinstance(v, str) for v in axes.values()):
            raise FrameError("axes values must be strings")
    duration_ms = doc.get("duration_ms")
    if not isinstance(duration_ms, int) or duration_ms < 0:
        raise FrameError("duration_ms must be a non-negative integer")
    error = doc.get("error")
    if error is not None and not isinstance(error, str):
        raise FrameError("error must be a string when present")
    try:
        result = ExecutionResult(
            status=status,
            kind=kind,
            payload=doc.get("payload"),
            axes=axes,
            error_summary=error,
            duration=duration_ms / 1000.0,
        )
    except ValueError as exc:
        raise FrameError(str(exc)) from exc
    return request_id, result


def _parse_line(line: bytes | str) -> dict:
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FrameError(f"frame is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FrameError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FrameError("frame must be a JSON object")
    return doc
