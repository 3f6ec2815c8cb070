"""Engine configuration: key-value text file with environment overrides.

File format is one `key = value` per line, `#` starts a comment.
Every key can be overridden by an environment variable named
TABCHAT_<KEY with dots replaced by underscores, uppercased>, e.g.
`gateway.endpoint` -> TABCHAT_GATEWAY_ENDPOINT.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .profiling import Caps
from .sandbox.policy import DEFAULT_WHITELIST, SandboxPolicy


@dataclass(frozen=True)
class EngineConfig:
    data_dir: str = "tabchat-data"
    memory_turns: int = 10
    gateway_mode: str = "mock"  # mock | http
    gateway_endpoint: str = ""
    gateway_model: str = ""
    gateway_api_key: str = ""
    gateway_timeout: float = 30.0
    gateway_retries: int = 1
    gateway_script: str = ""
    asr_endpoint: str = ""
    tts_endpoint: str = ""
    tts_voice: str = "default"
    speech_timeout: float = 30.0
    caps: Caps = field(default_factory=Caps)
    policy: SandboxPolicy = field(default_factory=SandboxPolicy)


_KEY_TYPES = {
    "data_dir": str,
    "memory.turns": int,
    "gateway.mode": str,
    "gateway.endpoint": str,
    "gateway.model": str,
    "gateway.api_key": str,
    "gateway.timeout": float,
    "gateway.retries": int,
    "gateway.script": str,
    "speech.asr_endpoint": str,
    "speech.tts_endpoint": str,
    "speech.voice": str,
    "speech.timeout": float,
    "caps.sample_rows": int,
    "caps.exemplars_per_column": int,
    "caps.history_turns": int,
    "sandbox.whitelist": str,
    "sandbox.timeout": float,
    "sandbox.cpu_limit": float,
    "sandbox.memory_limit": int,
}


class BadConfig(ValueError):
    pass


def _parse_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadConfig(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _env_key(key: str) -> str:
    return "TABCHAT_" + key.replace(".", "_").upper()


def load_config(path: str | Path | None = None, env: dict | None = None) -> EngineConfig:
    env = dict(os.environ if env is None else env)
    raw = _parse_file(path) if path else {}
    for key in _KEY_TYPES:
        override = env.get(_env_key(key))
        if override is not None:
            raw[key] = override
    unknown = set(raw) - set(_KEY_TYPES)
    if unknown:
        raise BadConfig(f"unknown config keys: {', '.join(sorted(unknown))}")

    typed: dict[str, object] = {}
    for key, value in raw.items():
        caster = _KEY_TYPES[key]
        try:
            typed[key] = caster(value)
        except ValueError as exc:
            raise BadConfig(f"config key {key}: {exc}") from exc

    caps = Caps(
        sample_rows=int(typed.get("caps.sample_rows", Caps.sample_rows)),
        exemplars_per_column=int(
            typed.get("caps.exemplars_per_column", Caps.exemplars_per_column)
        ),
        history_turns=int(typed.get("caps.history_turns", Caps.history_turns)),
    )
    whitelist = DEFAULT_WHITELIST
    if "sandbox.whitelist" in typed:
        whitelist = tuple(
            w.strip() for w in str(typed["sandbox.whitelist"]).split(",") if w.strip()
        )
    policy = SandboxPolicy(
        whitelist=whitelist,
        timeout=float(typed.get("sandbox.timeout", SandboxPolicy.timeout)),
        cpu_limit=float(typed.get("sandbox.cpu_limit", SandboxPolicy.cpu_limit)),
        memory_limit=int(typed.get("sandbox.memory_limit", SandboxPolicy.memory_limit)),
    )
    config = EngineConfig(caps=caps, policy=policy)
    simple = {
        "data_dir": "data_dir",
        "memory.turns": "memory_turns",
        "gateway.mode": "gateway_mode",
        "gateway.endpoint": "gateway_endpoint",
        "gateway.model": "gateway_model",
        "gateway.api_key": "gateway_api_key",
        "gateway.timeout": "gateway_timeout",
        "gateway.retries": "gateway_retries",
        "gateway.script": "gateway_script",
        "speech.asr_endpoint": "asr_endpoint",
        "speech.tts_endpoint": "tts_endpoint",
        "speech.voice": "tts_voice",
        "speech.timeout": "speech_timeout",
    }
    updates = {attr: typed[key] for key, attr in simple.items() if key in typed}
    return replace(config, **updates)
