"""The engine: ties profiling, routing, prompting, the gateway, the
sandbox and speech into the per-turn pipeline, and owns session state.

Pipeline per turn: normalize input -> align terms -> build context pack
-> decide -> one branch (generate+validate+execute, or narrate) ->
optional speech synthesis -> record with stage timings.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
import uuid

from .config import EngineConfig
from .context import align_terms, build_context_pack
from .dialogue import SessionState, StageTimings, TurnFailed, TurnRecord, context_window
from .gateway import CompletionRequest, GatewayUnavailable, complete_with_retry
from .profiling import DatasetProfile, ingest_dataset
from .prompts import (
    RenderedPrompt,
    extract_code,
    render_chat_prompt,
    render_code_prompt,
    strip_comments,
    validate_code,
)
from .router import CODE, decide
from .sandbox.protocol import ExecutionResult
from .sandbox.supervisor import SandboxSupervisor
from .speech import AudioClip, FixtureAsr, FixtureTts
from .store import DataStore

log = logging.getLogger(__name__)


class UnknownSession(KeyError):
    pass


class UnknownDataset(KeyError):
    pass


def _prompt_digest(prompt: RenderedPrompt) -> dict:
    joined = prompt.system_text + "\n" + prompt.user_text
    return {
        "policy": prompt.policy,
        "sha256": hashlib.sha256(joined.encode("utf-8")).hexdigest(),
        "user_text": prompt.user_text,
    }


class Engine:
    def __init__(
        self,
        config: EngineConfig,
        gateway,
        asr=None,
        tts=None,
        supervisor: SandboxSupervisor | None = None,
    ):
        self.config = config
        self.gateway = gateway
        self.asr = asr or FixtureAsr()
        self.tts = tts or FixtureTts()
        self.store = DataStore(config.data_dir)
        self.supervisor = supervisor or SandboxSupervisor(
            config.policy, self.store.dataset_path
        )
        self._profiles: dict[str, DatasetProfile] = {}
        self._sessions: dict[str, SessionState] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- datasets ---------------------------------------------------------

    def upload_dataset(self, content: bytes, name: str) -> DatasetProfile:
        profile = ingest_dataset(content, name, self.config.caps)
        self.store.save_dataset(profile, content)
        with self._registry_lock:
            self._profiles[profile.dataset_id] = profile
        return profile

    def get_profile(self, dataset_id: str) -> DatasetProfile:
        with self._registry_lock:
            profile = self._profiles.get(dataset_id)
        if profile is None:
            try:
                profile = self.store.load_profile(dataset_id)
            except KeyError as exc:
                raise UnknownDataset(dataset_id) from exc
            with self._registry_lock:
                self._profiles[dataset_id] = profile
        return profile

    # -- sessions ---------------------------------------------------------

    def create_session(self, dataset_id: str, memory_capacity: int | None = None) -> str:
        self.get_profile(dataset_id)
        session_id = uuid.uuid4().hex
        capacity = (
            self.config.memory_turns if memory_capacity is None else memory_capacity
        )
        with self._registry_lock:
            self._sessions[session_id] = SessionState(
                session_id=session_id,
                dataset_id=dataset_id,
                memory_capacity=capacity,
            )
            self._session_locks[session_id] = threading.Lock()
        self.store.save_session_meta(
            session_id, {"dataset_id": dataset_id, "memory_capacity": capacity}
        )
        return session_id

    def get_session(self, session_id: str) -> SessionState:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def close_session(self, session_id: str) -> None:
        self.supervisor.close_session(session_id)
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._session_locks.pop(session_id, None)

    def shutdown(self) -> None:
        self.supervisor.shutdown()

    # -- turns --------------------------------------------------------------

    def handle_turn(
        self,
        session_id: str,
        text: str | None = None,
        audio: AudioClip | None = None,
        want_audio: bool = False,
    ) -> TurnRecord:
        session = self.get_session(session_id)
        with self._registry_lock:
            lock = self._session_locks[session_id]
        with lock:  # one in-flight turn per session
            return self._run_turn(session, text, audio, want_audio)

    def _run_turn(
        self,
        session: SessionState,
        text: str | None,
        audio: AudioClip | None,
        want_audio: bool,
    ) -> TurnRecord:
        origin = "text"
        if audio is not None:
            text, asr_latency = self.asr.transcribe(audio)
            origin = "speech"
            log.debug("transcribed %.3fs of audio in %.3fs", audio.duration, asr_latency)
        text = text or ""

        profile = self.get_profile(session.dataset_id)
        aligned = align_terms(text, profile)
        pack = build_context_pack(profile, context_window(session), self.config.caps)

        started = time.perf_counter()
        try:
            decision = decide(
                aligned.text, pack, self.gateway, retries=self.config.gateway_retries
            )
        except GatewayUnavailable as exc:
            raise TurnFailed(str(exc), retryable=True) from exc
        timings = StageTimings(t_dec=time.perf_counter() - started)

        record = TurnRecord(
            turn_id=uuid.uuid4().hex,
            input_text=text,
            input_origin=origin,
            decision=decision,
            timings=timings,
        )

        if decision.action == CODE:
            self._code_branch(session, record, pack, aligned.text)
        else:
            self._chat_branch(record, pack, aligned.text)

        if want_audio and record.narration:
            started = time.perf_counter()
            clip, _ = self.tts.synthesize(record.narration)
            record.timings.t_tts = time.perf_counter() - started
            record.audio_ref = self.store.save_artifact(
                clip.data, f"audio/{clip.format}"
            )

        session.history.append(record)
        self.store.append_turn(session.session_id, record.to_dict())
        return record

    def _complete(self, prompt: RenderedPrompt, tag: str):
        try:
            return complete_with_retry(
                self.gateway,
                CompletionRequest(prompt=prompt, tag=tag),
                retries=self.config.gateway_retries,
            )
        except GatewayUnavailable as exc:
            raise TurnFailed(str(exc), retryable=True) from exc

    def _code_branch(self, session, record, pack, query: str) -> None:
        prompt = render_code_prompt(pack, query)
        record.prompt_used = _prompt_digest(prompt)
        started = time.perf_counter()
        completion = self._complete(prompt, "code")
        record.timings.t_code = time.perf_counter() - started

        snippet = strip_comments(extract_code(completion.text)).strip()
        record.code = snippet
        report = validate_code(snippet, self.get_profile(session.dataset_id))
        if report.ok:
            result = self.supervisor.execute(
                dataset_ref=session.dataset_id,
                snippet=snippet,
                policy=self.config.policy,
                session_id=session.session_id,
            )
        else:
            problems = "; ".join(v["detail"] for v in report.violations)
            result = ExecutionResult(
                status="runtime_error",
                error_summary=(
                    f"The generated code failed pre-checks ({problems}). "
                    "Try rephrasing the request with exact column names."
                ),
                duration=0.0,
            )
        record.timings.t_exec = result.duration
        record.artifact = result
        if result.status == "ok":
            record.artifact_id = self._store_artifact(result)
        else:
            record.narration = result.error_summary
            record.narration_is_error = True

    def _chat_branch(self, record, pack, query: str) -> None:
        prompt = render_chat_prompt(pack, query)
        record.prompt_used = _prompt_digest(prompt)
        started = time.perf_counter()
        completion = self._complete(prompt, "chat")
        record.timings.t_chat = time.perf_counter() - started
        record.narration = completion.text.strip()

    def _store_artifact(self, result: ExecutionResult) -> str:
        if result.kind == "figure":
            import base64

            return self.store.save_artifact(
                base64.b64decode(result.payload), "image/png"
            )
        doc = json.dumps({"kind": result.kind, "payload": result.payload})
        return self.store.save_artifact(doc.encode("utf-8"), "application/json")
