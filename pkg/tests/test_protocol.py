"""Wire protocol: encode/decode round trips and malformed-frame rejection."""

from __future__ import annotations

import json
import random
import string

import pytest

from tabchat.sandbox.policy import SandboxPolicy
from tabchat.sandbox.protocol import (
    ExecutionResult,
    FrameError,
    decode_request,
    decode_response,
    encode_load,
    encode_request,
    encode_response,
)


def test_request_roundtrip():
    policy = SandboxPolicy(timeout=7.5)
    frame = encode_request("abc", "df.head()", policy)
    doc = decode_request(frame)
    assert doc == {"id": "abc", "op": "exec", "code": "df.head()", "timeout_ms": 7500}


def test_load_frame_shape():
    doc = decode_request(encode_load("/tmp/x.csv"))
    assert doc == {"op": "load", "path": "/tmp/x.csv", "binding": "df"}


def test_scalar_response_roundtrip():
    result = ExecutionResult(status="ok", kind="scalar", payload=2, duration=0.012)
    rid, decoded = decode_response(encode_response("r1", result))
    assert rid == "r1"
    assert decoded == result


def test_figure_response_roundtrip():
    result = ExecutionResult(
        status="ok",
        kind="figure",
        payload="aGVsbG8=",
        axes={"title": "T", "x_label": "X", "y_label": "Y"},
        duration=0.5,
    )
    rid, decoded = decode_response(encode_response("r2", result))
    assert decoded == result


def test_truncated_frame_is_protocol_error():
    frame = encode_response("r", ExecutionResult(status="ok", kind="scalar", payload=1))
    with pytest.raises(FrameError):
        decode_response(frame[: len(frame) // 2])


@pytest.mark.parametrize(
    "doc",
    [
        {"id": "x", "status": "weird", "kind": None, "duration_ms": 1},
        {"id": "x", "status": "ok", "kind": None, "duration_ms": 1},
        {"id": "x", "status": "runtime_error", "kind": "table", "duration_ms": 1},
        {"id": "x", "status": "ok", "kind": "scalar", "duration_ms": -4},
        {"id": 7, "status": "ok", "kind": "scalar", "duration_ms": 1},
        {"id": "x", "status": "ok", "kind": "figure", "duration_ms": 1, "axes": {"bogus": "k"}},
        [1, 2, 3],
    ],
)
def test_malformed_response_frames_rejected(doc):
    with pytest.raises(FrameError):
        decode_response(json.dumps(doc))


def test_malformed_request_frames_rejected():
    for doc in (
        {"op": "exec", "code": "1"},
        {"op": "exec", "id": "a", "code": "1", "timeout_ms": 0},
        {"op": "load", "path": 3, "binding": "df"},
        {"op": "nope"},
    ):
        with pytest.raises(FrameError):
            decode_request(json.dumps(doc))
    with pytest.raises(FrameError):
        decode_request(b"\xff\xfe garbage")


def random_result(rng: random.Random) -> ExecutionResult:
    status = rng.choice(
        ["ok", "blocked_import", "runtime_error", "timeout", "resource_limit", "protocol_error"]
    )
    duration = rng.randrange(0, 100_000) / 1000.0  # millisecond-quantized
    if status != "ok":
        return ExecutionResult(
            status=status,
            error_summary=rng.choice([None, "SomeError: detail"]),
            duration=duration,
        )
    kind = rng.choice(["figure", "table", "scalar", "text"])
    axes = None
    if kind == "figure":
        payload = "".join(rng.choices(string.ascii_letters, k=24))
        axes = {
            "title": "".join(rng.choices(string.printable[:60], k=8)),
            "x_label": "x",
            "y_label": "y",
        }
    elif kind == "table":
        payload = {
            "rows": [{"a": rng.randrange(10), "b": "s"} for _ in range(rng.randrange(4))],
            "total_rows": rng.randrange(500),
            "truncated": rng.random() < 0.5,
        }
    elif kind == "scalar":
        payload = rng.choice([rng.randrange(-1000, 1000), rng.random(), True, False])
    else:
        payload = "".join(rng.choices(string.printable, k=rng.randrange(0, 40)))
    return ExecutionResult(status=status, kind=kind, payload=payload, axes=axes, duration=duration)


def test_roundtrip_identity_randomized():
    rng = random.Random(20240817)
    for i in range(1000):
        result = random_result(rng)
        rid = f"req-{i}"
        decoded_id, decoded = decode_response(encode_response(rid, result))
        assert decoded_id == rid
        assert decoded == result
