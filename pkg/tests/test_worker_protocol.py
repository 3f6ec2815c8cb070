"""Worker runtime driven directly over its stdio wire protocol.

These tests exercise the worker as an external program: raw NDJSON frames
in, raw frames out, no supervisor in between.
"""

from __future__ import annotations

import base64
import json
import subprocess
import sys
import time

import pytest

from tabchat.bench.datasets import write_insurance

from conftest import STEP2_SNIPPET

GUARD_FLAGS = ("imports_hooked", "os_disabled", "net_disabled", "fs_disabled")


class WorkerHarness:
    def __init__(self, whitelist="pandas,numpy,matplotlib"):
        self.proc = subprocess.Popen(
            [
                sys.executable,
                "-m",
                "tabchat.sandbox.worker",
                "--whitelist",
                whitelist,
                "--memory-bytes",
                str(1024**3),
                "--cpu-seconds",
                "15",
            ],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            bufsize=1,
        )

    def send(self, doc: dict) -> dict:
        self.proc.stdin.write(json.dumps(doc) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        assert line, "worker closed its stdout"
        return json.loads(line)

    def load(self, path: str, binding: str = "df") -> dict:
        return self.send({"op": "load", "path": str(path), "binding": binding})

    def exec(self, request_id: str, code: str) -> dict:
        return self.send(
            {"id": request_id, "op": "exec", "code": code, "timeout_ms": 10000}
        )

    def close(self):
        if self.proc.poll() is None:
            self.proc.kill()
        self.proc.wait(timeout=5)


@pytest.fixture
def worker(tmp_path):
    harness = WorkerHarness()
    yield harness, write_insurance(tmp_path / "insurance.csv")
    harness.close()


def test_worker_roundtrip_under_ten_seconds(worker):
    harness, csv = worker
    started = time.perf_counter()

    ack = harness.load(csv)
    assert ack["status"] == "ok"
    # all guard flags active before the first exec frame
    assert all(ack["guards"][flag] is True for flag in GUARD_FLAGS)

    scalar = harness.exec("r1", "1+1")
    assert scalar["id"] == "r1"
    assert scalar["status"] == "ok" and scalar["kind"] == "scalar"
    assert scalar["payload"] == 2

    table = harness.exec("r2", "df.head()")
    assert table["status"] == "ok" and table["kind"] == "table"
    assert len(table["payload"]["rows"]) == 5

    figure = harness.exec("r3", STEP2_SNIPPET)
    assert figure["status"] == "ok" and figure["kind"] == "figure"
    assert figure["axes"] == {
        "title": "Charges vs BMI by Smoker Status",
        "x_label": "BMI",
        "y_label": "Charges",
    }
    assert base64.b64decode(figure["payload"])[:8] == b"\x89PNG\r\n\x1a\n"

    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"load + three exec frames took {elapsed:.2f}s"


def test_exec_before_load_is_protocol_error():
    harness = WorkerHarness()
    try:
        reply = harness.send(
            {"id": "early", "op": "exec", "code": "1+1", "timeout_ms": 1000}
        )
        assert reply["status"] == "protocol_error"
        assert reply["id"] == "early"
    finally:
        harness.close()


def test_guards_active_on_first_frame(worker):
    harness, csv = worker
    harness.load(csv)
    reply = harness.exec("g1", "import os\nos.getcwd()")
    assert reply["status"] == "blocked_import"
    assert "os" in reply["error"]


def test_exception_reports_final_traceback_line(worker):
    harness, csv = worker
    harness.load(csv)
    reply = harness.exec("e1", "df['missing_column']")
    assert reply["status"] == "runtime_error"
    assert reply["error"].startswith("KeyError")
    assert "Traceback" not in reply["error"]


def test_large_table_truncated_with_flag(worker):
    harness, csv = worker
    harness.load(csv)
    reply = harness.exec(
        "t1", "pd.DataFrame({'n': range(10000)})"
    )
    assert reply["status"] == "ok" and reply["kind"] == "table"
    assert len(reply["payload"]["rows"]) == 200
    assert reply["payload"]["total_rows"] == 10000
    assert reply["payload"]["truncated"] is True


def test_one_response_per_frame_even_for_garbage(worker):
    harness, csv = worker
    harness.load(csv)
    reply = harness.send({"op": "unknown-op", "id": "z"})
    assert reply["status"] == "protocol_error"
    follow = harness.exec("z2", "2+2")
    assert follow["payload"] == 4  # worker still serving


def test_bindings_persist_across_frames(worker):
    harness, csv = worker
    harness.load(csv)
    harness.exec("p1", "total = df['charges'].sum()\n1")
    reply = harness.exec("p2", "total > 0")
    assert reply["status"] == "ok" and reply["payload"] is True
