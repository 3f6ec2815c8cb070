"""Fixture gateway scripts replaying two recorded model profiles.

The "7b" profile answers 47 of 48 routes correctly, misroutes one clear
plotting request into a clarification, and produces one snippet that the
sandbox blocks. The "1p5b" profile behaves like a small, over-cautious
model: 17 code tasks answered with clarifications instead of code, plus
the same blocked snippet.

Rule matchers anchor on the "Request: <query>" line so history digests in
multi-turn prompts can never shadow the current query.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..context import align_terms
from ..gateway import ScriptedGateway, make_scripted_gateway
from ..profiling import DatasetProfile, ingest_dataset
from .catalog import BLOCKED_IMPORT_TASK, CATALOG, CLARIFICATION, MISROUTED_BY_7B

FIXTURE_STYLES = ("7b", "1p5b")

_CODE_JSON = '{"action": "code_generation", "reason": "needs computation"}'
_CHAT_JSON = '{"action": "chat_response", "reason": "answerable from the description"}'


def profiles_for(dataset_paths: dict[str, str]) -> dict[str, DatasetProfile]:
    return {
        name: ingest_dataset(Path(path).read_bytes(), name)
        for name, path in dataset_paths.items()
    }


def misrouted_ids(style: str) -> set[str]:
    if style == "7b":
        return set(MISROUTED_BY_7B)
    if style == "1p5b":
        code_ids = sorted(
            e.id for e in CATALOG if e.category != "narrative" and e.id != BLOCKED_IMPORT_TASK
        )
        return set(code_ids[:17])
    raise ValueError(f"unknown fixture style {style!r}")


def build_fixture_script(
    style: str, profiles: dict[str, DatasetProfile] | None = None
) -> dict:
    """Build one fixture script; with profiles, anchors use the term-aligned
    query text exactly as the engine will render it."""
    misrouted = misrouted_ids(style)
    rules = []
    for entry in CATALOG:
        query = entry.query
        if profiles and entry.dataset in profiles:
            query = align_terms(entry.query, profiles[entry.dataset]).text
        anchor = f"Request: {query}"
        expects_code = entry.category != "narrative"
        answers_code = expects_code and entry.id not in misrouted
        rules.append(
            {
                "tag": "decision",
                "match": anchor,
                "response": _CODE_JSON if answers_code else _CHAT_JSON,
            }
        )
        if answers_code:
            rules.append({"tag": "code", "match": anchor, "response": entry.code})
        elif expects_code:
            rules.append({"tag": "chat", "match": anchor, "response": CLARIFICATION})
        else:
            rules.append({"tag": "chat", "match": anchor, "response": entry.narration})
    return {
        "model_name": f"coder-{style}-fixture",
        "default": {
            "decision": _CHAT_JSON,
            "chat": "I am not sure what you mean; could you rephrase?",
            "code": "df.head()",
        },
        "rules": rules,
    }


def fixture_gateway(
    style: str, profiles: dict[str, DatasetProfile] | None = None
) -> ScriptedGateway:
    return make_scripted_gateway(build_fixture_script(style, profiles))


def write_fixture_script(
    style: str, path: str | Path, profiles: dict[str, DatasetProfile] | None = None
) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(build_fixture_script(style, profiles), indent=2), encoding="utf-8"
    )
    return path
