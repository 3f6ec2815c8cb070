"""Model-completion capability: one HTTP client and one scripted mock.

Both speak the same complete() contract so the rest of the engine never
knows which is behind it. The scripted gateway replays canned
completions keyed on (tag, substring) and is the workhorse for tests
and desk-scale benchmarking.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .prompts import RenderedPrompt

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURES = {"decision": 0.0, "code": 0.0, "chat": 0.3}
DEFAULT_MAX_TOKENS = {"decision": 128, "code": 768, "chat": 256}


class GatewayUnavailable(RuntimeError):
    """Transport failure reaching the completion backend."""


class ProtocolError(RuntimeError):
    """The completion endpoint replied with something unusable."""


class BadScript(ValueError):
    """A gateway script file could not be parsed."""


@dataclass(frozen=True)
class Completion:
    text: str
    latency: float
    model_name: str


@dataclass(frozen=True)
class CompletionRequest:
    prompt: RenderedPrompt
    tag: str
    max_tokens: int = 0
    temperature: float | None = None

    def __post_init__(self):
        if self.tag != self.prompt.policy:
            raise ValueError(
                f"request tag {self.tag!r} does not match prompt policy "
                f"{self.prompt.policy!r}"
            )

    @property
    def effective_max_tokens(self) -> int:
        return self.max_tokens or DEFAULT_MAX_TOKENS[self.tag]

    @property
    def effective_temperature(self) -> float:
        if self.temperature is None:
            return DEFAULT_TEMPERATURES[self.tag]
        return self.temperature


class HttpGateway:
    """Client for a chat-completions-compatible JSON endpoint."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 30.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.audit: list[tuple[str, str]] = []
        self._client = httpx.Client(timeout=timeout)

    def complete(self, request: CompletionRequest) -> Completion:
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.prompt.system_text},
                {"role": "user", "content": request.prompt.user_text},
            ],
            "max_tokens": request.effective_max_tokens,
            "temperature": request.effective_temperature,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        started = time.perf_counter()
        try:
            response = self._client.post(self.endpoint, json=body, headers=headers)
        except httpx.HTTPError as exc:
            raise GatewayUnavailable(f"completion endpoint unreachable: {exc}") from exc
        latency = time.perf_counter() - started
        if response.status_code >= 400:
            raise ProtocolError(
                f"completion endpoint returned HTTP {response.status_code}"
            )
        try:
            data = response.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProtocolError(f"malformed completion reply: {exc}") from exc
        if not isinstance(text, str):
            raise ProtocolError("completion content is not text")
        completion = Completion(text=text, latency=latency, model_name=self.model)
        self._audit(request, completion)
        return completion

    def _audit(self, request: CompletionRequest, completion: Completion) -> None:
        self.audit.append((request.prompt.user_text, completion.text))
        log.debug("gateway %s tag=%s latency=%.3fs", self.model, request.tag, completion.latency)

    def close(self) -> None:
        self._client.close()


@dataclass(frozen=True)
class ScriptRule:
    tag: str
    match: str
    response: str


class ScriptedGateway:
    """Deterministic gateway: first rule whose tag matches and whose match
    string occurs in the prompt's user text wins; otherwise the default."""

    def __init__(
        self,
        rules: list[ScriptRule] | None = None,
        default: str | dict[str, str] = "",
        model_name: str = "scripted-mock",
    ):
        self.rules = list(rules or [])
        self.default = default
        self.model_name = model_name
        self.audit: list[tuple[str, str]] = []

    def _default_for(self, tag: str) -> str:
        if isinstance(self.default, dict):
            return self.default.get(tag, "")
        return self.default

    def complete(self, request: CompletionRequest) -> Completion:
        started = time.perf_counter()
        text = self._default_for(request.tag)
        for rule in self.rules:
            if rule.tag == request.tag and rule.match in request.prompt.user_text:
                text = rule.response
                break
        latency = time.perf_counter() - started
        completion = Completion(text=text, latency=latency, model_name=self.model_name)
        self.audit.append((request.prompt.user_text, text))
        return completion


def make_scripted_gateway(doc: dict, model_name: str | None = None) -> ScriptedGateway:
    """Build a scripted gateway from a parsed script document."""
    if not isinstance(doc, dict):
        raise BadScript("script root must be an object")
    raw_rules = doc.get("rules", [])
    if not isinstance(raw_rules, list):
        raise BadScript("script 'rules' must be a list")
    rules = []
    for i, raw in enumerate(raw_rules):
        try:
            tag = raw["tag"]
            match = raw["match"]
            response = raw["response"]
        except (TypeError, KeyError) as exc:
            raise BadScript(f"rule {i} is missing {exc}") from exc
        if tag not in ("decision", "chat", "code"):
            raise BadScript(f"rule {i} has unknown tag {tag!r}")
        rules.append(ScriptRule(tag=tag, match=str(match), response=str(response)))
    default = doc.get("default", "")
    if not isinstance(default, (str, dict)):
        raise BadScript("script 'default' must be a string or per-tag object")
    return ScriptedGateway(
        rules=rules,
        default=default,
        model_name=model_name or str(doc.get("model_name", "scripted-mock")),
    )


def load_script(path: str | Path) -> ScriptedGateway:
    """Load a scripted gateway from a JSON file; raises BadScript on garbage."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise BadScript(f"cannot read script file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadScript(f"script file is not valid JSON: {exc}") from exc
    return make_scripted_gateway(doc)


def complete_with_retry(
    gateway, request: CompletionRequest, retries: int = 1
) -> Completion:
    """One configured retry on transport failure, then surface the error."""
    attempts = retries + 1
    last: GatewayUnavailable | None = None
    for _ in range(attempts):
        try:
            return gateway.complete(request)
        except GatewayUnavailable as exc:
            last = exc
    assert last is not None
    raise last
