"""Optional speech in/out: thin clients for external ASR and TTS services
plus deterministic fixtures for tests and desk-scale runs.

ASR latency is reported to the caller but kept out of model-only time by
the dialogue layer.
"""

from __future__ import annotations

import io
import time
import wave
from dataclasses import dataclass

import httpx


class AsrUnavailable(RuntimeError):
    pass


class TtsUnavailable(RuntimeError):
    pass


class EmptyAudio(ValueError):
    pass


class EmptyText(ValueError):
    pass


@dataclass(frozen=True)
class AudioClip:
    data: bytes
    format: str = "wav"  # wav | ogg
    duration: float = 0.0


def make_wav(duration: float, rate: int = 16000) -> bytes:
    """A silent 16 kHz mono WAV of the given duration."""
    frames = max(1, int(duration * rate))
    buf = io.BytesIO()
    with wave.open(buf, "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(rate)
        fh.writeframes(b"\x00\x00" * frames)
    return buf.getvalue()


def wav_duration(data: bytes) -> float:
    with wave.open(io.BytesIO(data), "rb") as fh:
        rate = fh.getframerate()
        return fh.getnframes() / float(rate) if rate else 0.0


_TAG_PREFIX = b"\x00TAG:"


def fixture_clip(tag: str, duration: float = 0.5) -> AudioClip:
    """A playable WAV whose trailing bytes carry a delimited fixture tag."""
    data = make_wav(duration) + _TAG_PREFIX + tag.encode("utf-8") + b"\x00"
    return AudioClip(data=data, format="wav", duration=duration)


class FixtureAsr:
    """Deterministic transcriber: first mapping tag found in the clip bytes wins."""

    def __init__(self, transcripts: dict[str, str] | None = None):
        self.transcripts = dict(transcripts or {})

    def transcribe(self, clip: AudioClip) -> tuple[str, float]:
        if not clip.data:
            raise EmptyAudio("audio clip is empty")
        started = time.perf_counter()
        text = ""
        for tag in sorted(self.transcripts):
            if _TAG_PREFIX + tag.encode("utf-8") + b"\x00" in clip.data:
                text = self.transcripts[tag]
                break
        return text, time.perf_counter() - started


class FixtureTts:
    """Deterministic synthesizer: silent WAV sized by the narration length."""

    def synthesize(self, text: str) -> tuple[AudioClip, float]:
        if not text or not text.strip():
            raise EmptyText("nothing to synthesize")
        started = time.perf_counter()
        duration = max(0.4, 0.05 * len(text.split()))
        clip = AudioClip(data=make_wav(duration), format="wav", duration=duration)
        return clip, time.perf_counter() - started


class HttpAsrClient:
    """Multipart audio up, JSON {"text": ...} back."""

    def __init__(self, endpoint: str, timeout: float = 30.0, language: str = "en"):
        self.endpoint = endpoint
        self.timeout = timeout
        self.language = language

    def transcribe(self, clip: AudioClip) -> tuple[str, float]:
        if not clip.data:
            raise EmptyAudio("audio clip is empty")
        started = time.perf_counter()
        try:
            response = httpx.post(
                self.endpoint,
                files={"file": (f"clip.{clip.format}", clip.data, f"audio/{clip.format}")},
                data={"language": self.language},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise AsrUnavailable(f"speech recognition unreachable: {exc}") from exc
        latency = time.perf_counter() - started
        if response.status_code >= 400:
            raise AsrUnavailable(f"speech recognition returned HTTP {response.status_code}")
        try:
            text = response.json()["text"]
        except (ValueError, KeyError) as exc:
            raise AsrUnavailable(f"malformed transcription reply: {exc}") from exc
        return str(text), latency


class HttpTtsClient:
    """JSON text up, audio bytes back."""

    def __init__(
        self,
        endpoint: str,
        voice: str = "default",
        timeout: float = 30.0,
        audio_format: str = "wav",
    ):
        self.endpoint = endpoint
        self.voice = voice
        self.timeout = timeout
        self.audio_format = audio_format

    def synthesize(self, text: str) -> tuple[AudioClip, float]:
        if not text or not text.strip():
            raise EmptyText("nothing to synthesize")
        started = time.perf_counter()
        try:
            response = httpx.post(
                self.endpoint,
                json={"text": text, "voice": self.voice, "format": self.audio_format},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise TtsUnavailable(f"speech synthesis unreachable: {exc}") from exc
        latency = time.perf_counter() - started
        if response.status_code >= 400:
            raise TtsUnavailable(f"speech synthesis returned HTTP {response.status_code}")
        data = response.content
        if not data:
            raise TtsUnavailable("speech synthesis returned no audio")
        duration = 0.0
        if self.audio_format == "wav":
            try:
                duration = wav_duration(data)
            except (wave.Error, EOFError):
                duration = 0.0
        if duration <= 0:
            duration = max(0.1, len(data) / 32000.0)
        clip = AudioClip(data=data, format=self.audio_format, duration=duration)
        return clip, latency
