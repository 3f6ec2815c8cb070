"""Turn records, sliding-window memory and latency bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field

from .router import CHAT, CODE, Decision
from .sandbox.protocol import ExecutionResult


class EmptyInput(ValueError):
    """No records to aggregate."""


class TurnFailed(RuntimeError):
    """A turn could not complete; retryable marks transient causes."""

    def __init__(self, message: str, retryable: bool = False):
        super().__init__(message)
        self.retryable = retryable


@dataclass
class StageTimings:
    t_dec: float | None = None
    t_code: float | None = None
    t_exec: float | None = None
    t_chat: float | None = None
    t_tts: float | None = None

    def to_dict(self) -> dict:
        return {
            "t_dec": self.t_dec,
            "t_code": self.t_code,
            "t_exec": self.t_exec,
            "t_chat": self.t_chat,
            "t_tts": self.t_tts,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "StageTimings":
        return cls(**{k: doc.get(k) for k in ("t_dec", "t_code", "t_exec", "t_chat", "t_tts")})


@dataclass
class TurnRecord:
    turn_id: str
    input_text: str
    input_origin: str  # text | speech
    decision: Decision
    prompt_used: dict = field(default_factory=dict)
    code: str | None = None
    artifact: ExecutionResult | None = None
    artifact_id: str | None = None
    narration: str | None = None
    narration_is_error: bool = False
    audio_ref: str | None = None
    timings: StageTimings = field(default_factory=StageTimings)

    def to_dict(self, include_figure_payload: bool = False) -> dict:
        artifact = None
        if self.artifact is not None:
            artifact = self.artifact.to_dict()
            if self.artifact.kind == "figure" and not include_figure_payload:
                artifact["payload"] = None
        return {
            "turn_id": self.turn_id,
            "input_text": self.input_text,
            "input_origin": self.input_origin,
            "decision": self.decision.to_dict(),
            "prompt_used": dict(self.prompt_used),
            "code": self.code,
            "artifact": artifact,
            "artifact_id": self.artifact_id,
            "narration": self.narration,
            "narration_is_error": self.narration_is_error,
            "audio_ref": self.audio_ref,
            "timings": self.timings.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TurnRecord":
        artifact = doc.get("artifact")
        return cls(
            turn_id=doc["turn_id"],
            input_text=doc["input_text"],
            input_origin=doc["input_origin"],
            decision=Decision.from_dict(doc["decision"]),
            prompt_used=dict(doc.get("prompt_used", {})),
            code=doc.get("code"),
            artifact=ExecutionResult.from_dict(artifact) if artifact else None,
            artifact_id=doc.get("artifact_id"),
            narration=doc.get("narration"),
            narration_is_error=bool(doc.get("narration_is_error", False)),
            audio_ref=doc.get("audio_ref"),
            timings=StageTimings.from_dict(doc.get("timings", {})),
        )


@dataclass
class SessionState:
    session_id: str
    dataset_id: str
    history: list[TurnRecord] = field(default_factory=list)
    memory_capacity: int = 10


def context_window(session: SessionState) -> list[TurnRecord]:
    """The at-most-N most recent turns, oldest first."""
    n = session.memory_capacity
    if n <= 0:
        return []
    return list(session.history[-n:])


@dataclass(frozen=True)
class LatencyReport:
    stage_means: dict
    n_code: int
    n_chat: int
    n_total: int
    t_model: float

    def to_dict(self) -> dict:
        return {
            "stage_means": dict(self.stage_means),
            "n_code": self.n_code,
            "n_chat": self.n_chat,
            "n_total": self.n_total,
            "t_model": self.t_model,
        }


def model_only_time(
    t_dec: float,
    t_code: float,
    t_chat: float,
    t_tts: float,
    n_code: int,
    n_chat: int,
) -> float:
    """Mean decision + generation (+ speech synthesis) latency per turn.

    Execution and speech recognition never enter this figure.
    """
    n_total = n_code + n_chat
    if n_total <= 0:
        raise EmptyInput("no turns to aggregate")
    return t_dec + (t_code * n_code + (t_chat + t_tts) * n_chat) / n_total


def _mean(values: list[float | None]) -> float:
    present = [v for v in values if v is not None]
    if not present:
        return 0.0
    return sum(present) / len(present)


def compute_model_only_time(records: list[TurnRecord]) -> LatencyReport:
    """Aggregate stage means over present values and apply the model-only formula."""
    if not records:
        raise EmptyInput("no records")
    code = [r for r in records if r.decision.action == CODE]
    chat = [r for r in records if r.decision.action == CHAT]
    t_dec = _mean([r.timings.t_dec for r in records])
    t_code = _mean([r.timings.t_code for r in code])
    t_exec = _mean([r.timings.t_exec for r in code])
    t_chat = _mean([r.timings.t_chat for r in chat])
    t_tts = _mean([r.timings.t_tts for r in chat])
    t_model = model_only_time(t_dec, t_code, t_chat, t_tts, len(code), len(chat))
    return LatencyReport(
        stage_means={
            "decision": t_dec,
            "code_gen": t_code,
            "exec": t_exec,
            "chat": t_chat,
            "tts": t_tts,
        },
        n_code=len(code),
        n_chat=len(chat),
        n_total=len(records),
        t_model=t_model,
    )
