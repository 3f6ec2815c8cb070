"""Supervision of worker processes from outside the sandbox.

The supervisor owns spawning, the load handshake, per-request wall-clock
kills and the conversion of every failure into a typed ExecutionResult.
Workers are pooled per (session, dataset) so bindings persist across the
turns of one conversation, and a worker is recycled after any non-ok
status.
"""

from __future__ import annotations

import json
import logging
import queue
import subprocess
import sys
import threading
import time
import uuid
from collections import deque
from typing import Callable

from .explain import summarize_error
from .policy import SandboxPolicy
from .protocol import (
    ExecutionResult,
    FrameError,
    decode_response,
    encode_load,
    encode_request,
)

log = logging.getLogger(__name__)

_LOAD_TIMEOUT = 60.0


class SpawnError(RuntimeError):
    """The worker did not come up or refused the dataset."""


def default_worker_command(policy: SandboxPolicy) -> list[str]:
    return [
        sys.executable,
        "-m",
        "tabchat.sandbox.worker",
        "--whitelist",
        ",".join(policy.whitelist),
        "--memory-bytes",
        str(policy.memory_limit),
        "--cpu-seconds",
        str(max(1, int(policy.cpu_limit))),
    ]


class _Worker:
    def __init__(self, command: list[str], dataset_path: str, policy: SandboxPolicy):
        self.policy = policy
        self.dataset_path = dataset_path
        self.guards: dict = {}
        self.lock = threading.Lock()
        self._lines: queue.Queue = queue.Queue()
        self._stderr_tail: deque = deque(maxlen=50)
        self.proc = subprocess.Popen(
            command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            encoding="utf-8",
            bufsize=1,
        )
        threading.Thread(target=self._drain_stdout, daemon=True).start()
        threading.Thread(target=self._drain_stderr, daemon=True).start()
        self._handshake()

    def _drain_stdout(self):
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(("line", line))
        self._lines.put(("eof", None))

    def _drain_stderr(self):
        assert self.proc.stderr is not None
        for line in self.proc.stderr:
            self._stderr_tail.append(line.rstrip())

    def _handshake(self):
        self._send(encode_load(self.dataset_path))
        kind, line = self._next_line(_LOAD_TIMEOUT)
        if kind != "line":
            raise SpawnError(f"worker exited during load: {self.stderr_excerpt()}")
        try:
            ack = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SpawnError(f"unreadable load ack: {exc}") from exc
        if not isinstance(ack, dict) or ack.get("status") != "ok":
            detail = ack.get("error") if isinstance(ack, dict) else ack
            raise SpawnError(f"worker refused dataset: {detail}")
        self.guards = dict(ack.get("guards", {}))
        if not all(self.guards.get(flag) for flag in (
            "imports_hooked", "os_disabled", "net_disabled", "fs_disabled",
        )):
            self.kill()
            raise SpawnError(f"worker guards incomplete: {self.guards}")

    def _send(self, data: bytes):
        assert self.proc.stdin is not None
        self.proc.stdin.write(data.decode("utf-8"))
        self.proc.stdin.flush()

    def _next_line(self, timeout: float):
        try:
            return self._lines.get(timeout=timeout)
        except queue.Empty:
            return ("timeout", None)

    def request(self, frame: bytes, timeout: float):
        """Send one exec frame; returns ("line", text) | ("timeout"|"eof", None)."""
        try:
            self._send(frame)
        except (BrokenPipeError, OSError):
            return ("eof", None)
        return self._next_line(timeout)

    @property
    def alive(self) -> bool:
        return self.proc.poll() is None

    def kill(self):
        if self.alive:
            self.proc.kill()
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:  # pragma: no cover
            pass

    def stderr_excerpt(self) -> str:
        return "\n".join(list(self._stderr_tail)[-5:])


class SandboxSupervisor:
    """Pool of guarded workers keyed by (session, dataset)."""

    def __init__(
        self,
        policy: SandboxPolicy,
        dataset_path_resolver: Callable[[str], str],
        worker_command: Callable[[SandboxPolicy], list[str]] = default_worker_command,
    ):
        self.policy = policy
        self._resolve = dataset_path_resolver
        self._command = worker_command
        self._pool: dict[tuple[str, str], _Worker] = {}
        self._pool_lock = threading.Lock()

    def _get_worker(self, session_id: str, dataset_ref: str, policy: SandboxPolicy) -> _Worker:
        key = (session_id, dataset_ref)
        with self._pool_lock:
            worker = self._pool.get(key)
            if worker is not None and worker.alive and worker.policy == policy:
                return worker
            if worker is not None:
                worker.kill()
            worker = _Worker(self._command(policy), self._resolve(dataset_ref), policy)
            self._pool[key] = worker
            return worker

    def _discard(self, session_id: str, dataset_ref: str, worker: _Worker):
        worker.kill()
        with self._pool_lock:
            if self._pool.get((session_id, dataset_ref)) is worker:
                del self._pool[(session_id, dataset_ref)]

    def execute(
        self,
        dataset_ref: str,
        snippet: str,
        policy: SandboxPolicy | None = None,
        session_id: str = "default",
    ) -> ExecutionResult:
        """Run a validated snippet against the session's worker.

        Never raises past a typed result: every failure mode maps onto an
        ExecutionResult status, and the worker is killed from out here if
        it overruns the wall-clock budget.
        """
        policy = policy or self.policy
        try:
            worker = self._get_worker(session_id, dataset_ref, policy)
        except (SpawnError, OSError) as exc:
            log.warning("worker spawn failed: %s", exc)
            return self._failure("protocol_error", str(exc), 0.0)

        request_id = uuid.uuid4().hex
        frame = encode_request(request_id, snippet, policy)
        with worker.lock:
            started = time.perf_counter()
            kind, line = worker.request(frame, timeout=policy.timeout)
            elapsed = time.perf_counter() - started
            if kind == "timeout":
                self._discard(session_id, dataset_ref, worker)
                return self._failure(
                    "timeout", f"no result within {policy.timeout:g}s", elapsed
                )
            if kind == "eof":
                self._discard(session_id, dataset_ref, worker)
                return self._failure(
                    "protocol_error",
                    f"worker died mid-request: {worker.stderr_excerpt()}",
                    elapsed,
                )
            try:
                response_id, result = decode_response(line)
            except FrameError as exc:
                self._discard(session_id, dataset_ref, worker)
                return self._failure("protocol_error", str(exc), elapsed)
            if response_id != request_id:
                self._discard(session_id, dataset_ref, worker)
                return self._failure(
                    "protocol_error", f"response id mismatch: {response_id}", elapsed
                )
        if result.status != "ok":
            self._discard(session_id, dataset_ref, worker)
            raw = result.error_summary or ""
            result.error_summary = summarize_error(result.status, raw)
        return result

    def _failure(self, status: str, raw: str, duration: float) -> ExecutionResult:
        return ExecutionResult(
            status=status,
            error_summary=summarize_error(status, raw),
            duration=duration,
        )

    def kill(self, session_id: str, dataset_ref: str) -> None:
        """External kill switch for one session's worker."""
        with self._pool_lock:
            worker = self._pool.pop((session_id, dataset_ref), None)
        if worker is not None:
            worker.kill()

    def close_session(self, session_id: str) -> None:
        with self._pool_lock:
            keys = [k for k in self._pool if k[0] == session_id]
            workers = [self._pool.pop(k) for k in keys]
        for worker in workers:
            worker.kill()

    def shutdown(self) -> None:
        with self._pool_lock:
            workers = list(self._pool.values())
            self._pool.clear()
        for worker in workers:
            worker.kill()
