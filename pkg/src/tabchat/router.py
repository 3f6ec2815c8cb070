"""Turn routing: classify each request as code generation or chat response.

parse_decision is total: anything that is not a well-formed decision
object falls back to the low-risk chat path with the fallback flag set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .context import ContextPack
from .gateway import CompletionRequest, complete_with_retry
from .prompts import render_decision_prompt

CODE = "code_generation"
CHAT = "chat_response"
ACTIONS = (CODE, CHAT)


@dataclass(frozen=True)
class Decision:
    action: str
    rationale: str = ""
    fallback: bool = False

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action {self.action!r}")
        if self.fallback and self.action != CHAT:
            raise ValueError("fallback decisions must take the chat path")

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "rationale": self.rationale,
            "fallback": self.fallback,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Decision":
        return cls(
            action=doc["action"],
            rationale=doc.get("rationale", ""),
            fallback=bool(doc.get("fallback", False)),
        )


def first_json_object(text: str) -> str | None:
    """The first balanced {...} candidate in the text, or None."""
    start = text.find("{")
    if start < 0:
        return None
    depth = 0
    quote = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if quote:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                quote = False
            continue
        if ch == '"':
            quote = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def _fallback(reason: str) -> Decision:
    return Decision(action=CHAT, rationale=reason, fallback=True)


def parse_decision(raw: str) -> Decision:
    """Total parse of a model completion into a Decision."""
    if not isinstance(raw, str):
        return _fallback("completion was not text")
    candidate = first_json_object(raw)
    if candidate is None:
        return _fallback("no JSON object in completion")
    try:
        doc = json.loads(candidate)
    except (json.JSONDecodeError, RecursionError):
        return _fallback("completion JSON did not parse")
    if not isinstance(doc, dict):
        return _fallback("completion JSON is not an object")
    label = doc.get("action")
    if not isinstance(label, str):
        return _fallback("completion JSON has no action label")
    normalized = label.strip().lower()
    if normalized not in ACTIONS:
        return _fallback(f"unrecognized action label {label.strip()!r}")
    rationale = doc.get("reason") or doc.get("rationale") or ""
    return Decision(action=normalized, rationale=str(rationale), fallback=False)


def decide(query: str, pack: ContextPack, gateway, retries: int = 1) -> Decision:
    """Route one turn. Degenerate input takes the chat default without a model call."""
    if not query or not query.strip():
        return _fallback("empty input")
    prompt = render_decision_prompt(pack, query)
    completion = complete_with_retry(
        gateway, CompletionRequest(prompt=prompt, tag="decision"), retries=retries
    )
    return parse_decision(completion.text)
