"""Speech clients: fixtures, HTTP paths, error taxonomy."""

from __future__ import annotations

import json
import threading
import wave
import io
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from tabchat.speech import (
    AsrUnavailable,
    AudioClip,
    EmptyAudio,
    EmptyText,
    FixtureAsr,
    FixtureTts,
    HttpAsrClient,
    HttpTtsClient,
    TtsUnavailable,
    fixture_clip,
    make_wav,
    wav_duration,
)


def test_fixture_asr_known_tag():
    asr = FixtureAsr({"what columns": "what columns does this dataset have"})
    text, latency = asr.transcribe(fixture_clip("what columns"))
    assert text == "what columns does this dataset have"
    assert latency >= 0


def test_fixture_asr_deterministic():
    asr = FixtureAsr({"a": "alpha", "b": "beta"})
    clip = fixture_clip("b")
    assert [asr.transcribe(clip)[0] for _ in range(3)] == ["beta"] * 3


def test_empty_clip_rejected():
    asr = FixtureAsr({})
    with pytest.raises(EmptyAudio):
        asr.transcribe(AudioClip(data=b"", format="wav"))


def test_fixture_tts_produces_playable_wav():
    tts = FixtureTts()
    clip, latency = tts.synthesize("Hello")
    assert clip.format == "wav"
    assert clip.duration > 0
    assert wav_duration(clip.data) == pytest.approx(clip.duration, abs=0.01)
    assert latency >= 0


def test_tts_empty_text_distinct_error():
    tts = FixtureTts()
    with pytest.raises(EmptyText):
        tts.synthesize("   ")


def test_wav_helpers_roundtrip():
    data = make_wav(0.25)
    assert wav_duration(data) == pytest.approx(0.25, abs=0.01)
    with wave.open(io.BytesIO(data), "rb") as fh:
        assert fh.getframerate() == 16000
        assert fh.getnchannels() == 1


# -- HTTP clients ------------------------------------------------------------


class _SpeechStub(BaseHTTPRequestHandler):
    mode = "asr"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        if self.mode == "asr":
            payload = json.dumps({"text": "spoken words"}).encode()
            ctype = "application/json"
        else:
            payload = make_wav(0.3)
            ctype = "audio/wav"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def speech_server():
    server = HTTPServer(("127.0.0.1", 0), _SpeechStub)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_asr_roundtrip(speech_server):
    _SpeechStub.mode = "asr"
    client = HttpAsrClient(endpoint=speech_server + "/asr", timeout=5)
    text, latency = client.transcribe(fixture_clip("anything"))
    assert text == "spoken words"
    assert latency > 0


def test_http_tts_roundtrip(speech_server):
    _SpeechStub.mode = "tts"
    client = HttpTtsClient(endpoint=speech_server + "/tts", timeout=5)
    clip, latency = client.synthesize("short line")
    assert clip.data[:4] == b"RIFF"
    assert clip.duration == pytest.approx(0.3, abs=0.05)
    assert latency > 0


def test_http_asr_unreachable():
    client = HttpAsrClient(endpoint="http://127.0.0.1:1/asr", timeout=0.4)
    with pytest.raises(AsrUnavailable):
        client.transcribe(fixture_clip("x"))


def test_http_tts_unreachable():
    client = HttpTtsClient(endpoint="http://127.0.0.1:1/tts", timeout=0.4)
    with pytest.raises(TtsUnavailable):
        client.synthesize("hello")


def test_http_tts_empty_text_rejected_before_transport():
    client = HttpTtsClient(endpoint="http://127.0.0.1:1/tts", timeout=0.4)
    with pytest.raises(EmptyText):
        client.synthesize("")
