"""Per-turn grounding: schema digests, history digests and term alignment.

Everything rendered here is derived from the dataset profile and stored
turn records; nothing else is ever injected, so downstream prompts stay
faithful to the uploaded data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .profiling import Caps, DatasetProfile

_NUMBER_WORDS = {
    "zero": "0",
    "one": "1",
    "two": "2",
    "three": "3",
    "four": "4",
    "five": "5",
    "six": "6",
    "seven": "7",
    "eight": "8",
    "nine": "9",
    "ten": "10",
    "eleven": "11",
    "twelve": "12",
    "thirteen": "13",
    "fourteen": "14",
    "fifteen": "15",
    "sixteen": "16",
    "seventeen": "17",
    "eighteen": "18",
    "nineteen": "19",
    "twenty": "20",
}

_MAX_SPAN_WORDS = 4
_WORD_RE = re.compile(r"[A-Za-z0-9_']+")


@dataclass(frozen=True)
class ContextPack:
    schema_view: str
    history_view: str
    caps: Caps


@dataclass(frozen=True)
class Resolution:
    span: str
    start: int
    end: int
    column: str


@dataclass(frozen=True)
class AlignedUtterance:
    original: str
    text: str
    resolutions: tuple[Resolution, ...]


def format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return f"{value:g}"


def render_schema_view(profile: DatasetProfile, caps: Caps) -> str:
    lines = [
        f"dataset {profile.name}: {profile.row_count} rows, "
        f"{len(profile.columns)} columns",
        "columns:",
    ]
    for col in profile.columns:
        if col.kind == "numeric" and col.numeric_range is not None:
            lo, hi = col.numeric_range
            detail = f" range {format_number(lo)} to {format_number(hi)}"
        elif col.kind == "categorical" and col.exemplars:
            shown = col.exemplars[: caps.exemplars_per_column]
            detail = " values: " + ", ".join(shown)
        else:
            detail = ""
        nulls = f", {col.null_count} null" if col.null_count else ""
        lines.append(f"- {col.name} ({col.kind}){detail}{nulls}")
    samples = profile.sample_rows[: caps.sample_rows]
    if samples:
        lines.append("sample rows:")
        for row in samples:
            lines.append("- " + ", ".join(f"{k}={v}" for k, v in row.items()))
    return "\n".join(lines)


def render_history_view(history: Sequence, caps: Caps) -> str:
    """Digest the most recent turns: user text, decision, then code or narration.

    Accepts any records exposing input_text, decision.action, code and
    narration (figure bytes never enter the digest).
    """
    recent = list(history)[-caps.history_turns :] if caps.history_turns > 0 else []
    lines = []
    for record in recent:
        lines.append(f"user: {record.input_text}")
        if record.decision.action == "code_generation":
            body = record.code or "(no code produced)"
        else:
            body = record.narration or "(no reply)"
        lines.append(f"{record.decision.action}: {body}")
    return "\n".join(lines)


def build_context_pack(
    profile: DatasetProfile, history: Sequence, caps: Caps = Caps()
) -> ContextPack:
    return ContextPack(
        schema_view=render_schema_view(profile, caps),
        history_view=render_history_view(history, caps),
        caps=caps,
    )


def normalize_term(text: str) -> str:
    """Lowercase, strip non-alphanumerics and map number words to digits."""
    tokens = re.findall(r"[a-z0-9]+", text.lower())
    return "".join(_NUMBER_WORDS.get(t, t) for t in tokens)


def align_terms(utterance: str, profile: DatasetProfile) -> AlignedUtterance:
    """Resolve utterance spans to column names; unresolved spans stay untouched."""
    by_norm: dict[str, str] = {}
    for col in profile.columns:
        norm = normalize_term(col.name)
        if norm and norm not in by_norm:
            by_norm[norm] = col.name

    words = [(m.start(), m.end()) for m in _WORD_RE.finditer(utterance)]
    claimed = [False] * len(words)
    found: list[Resolution] = []
    for size in range(min(_MAX_SPAN_WORDS, len(words)), 0, -1):
        for i in range(len(words) - size + 1):
            if any(claimed[i : i + size]):
                continue
            start, end = words[i][0], words[i + size - 1][1]
            span = utterance[start:end]
            column = by_norm.get(normalize_term(span))
            if column is None:
                continue
            found.append(Resolution(span=span, start=start, end=end, column=column))
            for j in range(i, i + size):
                claimed[j] = True

    found.sort(key=lambda r: r.start)
    aligned = utterance
    for res in reversed(found):
        aligned = aligned[: res.start] + res.column + aligned[res.end :]
    return AlignedUtterance(
        original=utterance, text=aligned, resolutions=tuple(found)
    )
