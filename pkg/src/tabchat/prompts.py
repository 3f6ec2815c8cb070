"""The three prompt policies and the static contracts for generated code.

Templates are plain UTF-8 text files with the placeholders {schema},
{history} and {query}; they can be overridden without a rebuild by
pointing TABCHAT_TEMPLATES_DIR at a directory with the same file names.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .context import ContextPack
from .profiling import DatasetProfile

POLICIES = ("decision", "chat", "code")

_STATEMENT_KEYWORDS = {
    "import", "from", "for", "while", "if", "elif", "else", "def", "class",
    "return", "with", "try", "except", "finally", "pass", "break", "continue",
    "del", "assert", "raise", "global", "nonlocal", "yield", "lambda",
}

_FENCE_RE = re.compile(r"```[ \t]*[A-Za-z0-9_+-]*[ \t]*\n(.*?)```", re.DOTALL)
_AUGMENTED_PREFIX = set("+-*/%&|^@")


@dataclass(frozen=True)
class RenderedPrompt:
    policy: str
    system_text: str
    user_text: str


@dataclass
class ValidationReport:
    grounded: bool
    expression_final: bool
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.grounded and self.expression_final


@lru_cache(maxsize=None)
def _template(name: str) -> str:
    override = os.environ.get("TABCHAT_TEMPLATES_DIR")
    if override:
        path = Path(override) / f"{name}.txt"
        if path.exists():
            return path.read_text(encoding="utf-8")
    return (
        resources.files("tabchat.templates").joinpath(f"{name}.txt").read_text("utf-8")
    )


def _fill(template: str, **subs: str) -> str:
    # Single pass: placeholder-like text inside pack content is never
    # re-substituted, and stray braces in templates stay harmless.
    pattern = re.compile("|".join(re.escape("{" + key + "}") for key in subs))
    return pattern.sub(lambda match: subs[match.group()[1:-1]], template)


def _render(policy: str, pack: ContextPack, query: str) -> RenderedPrompt:
    schema_section = "Dataset description:\n" + pack.schema_view
    history_section = (
        "Recent conversation:\n" + pack.history_view if pack.history_view else ""
    )
    user = _fill(
        _template(f"{policy}_user"),
        schema=schema_section,
        history=history_section,
        query=query,
    )
    user = re.sub(r"\n{3,}", "\n\n", user).strip() + "\n"
    return RenderedPrompt(
        policy=policy, system_text=_template(f"{policy}_system"), user_text=user
    )


def render_decision_prompt(pack: ContextPack, query: str) -> RenderedPrompt:
    return _render("decision", pack, query)


def render_chat_prompt(pack: ContextPack, query: str) -> RenderedPrompt:
    return _render("chat", pack, query)


def render_code_prompt(pack: ContextPack, query: str) -> RenderedPrompt:
    return _render("code", pack, query)


def extract_code(completion_text: str) -> str:
    """Return the snippet from a completion, unwrapping one markdown fence if present."""
    match = _FENCE_RE.search(completion_text)
    if match:
        return match.group(1).strip()
    return completion_text.strip()


def strip_comments(code: str) -> str:
    """Drop #-comments outside string literals; keeps line structure intact."""
    out: list[str] = []
    quote: str | None = None
    i = 0
    n = len(code)
    while i < n:
        ch = code[i]
        if quote is not None:
            out.append(ch)
            if ch == "\\" and i + 1 < n:
                out.append(code[i + 1])
                i += 2
                continue
            if code.startswith(quote, i):
                out.append(quote[1:])
                i += len(quote)
                quote = None
                continue
            i += 1
            continue
        if ch in "\"'":
            triple = code[i : i + 3]
            quote = triple if triple in ('"""', "'''") else ch
            out.append(quote)
            i += len(quote)
            continue
        if ch == "#":
            while i < n and code[i] != "\n":
                i += 1
            continue
        out.append(ch)
        i += 1
    stripped = "".join(out)
    return "\n".join(line.rstrip() for line in stripped.splitlines())


def _iter_strings_and_brackets(code: str):
    """Yield ("str", value, stack_snapshot) and track bracket nesting.

    The stack holds entries ("[", is_subscript) / ("(",) / ("{",); a "["
    counts as a subscript when the previous non-space character ends a
    postfix target (identifier, closing bracket or string quote).
    """
    stack: list[tuple[str, bool]] = []
    i = 0
    n = len(code)
    prev_significant = ""
    while i < n:
        ch = code[i]
        if ch in "\"'":
            triple = code[i : i + 3]
            quote = triple if triple in ('"""', "'''") else ch
            j = i + len(quote)
            buf = []
            while j < n:
                if code[j] == "\\" and j + 1 < n:
                    buf.append(code[j + 1])
                    j += 2
                    continue
                if code.startswith(quote, j):
                    j += len(quote)
                    break
                buf.append(code[j])
                j += 1
            yield ("str", "".join(buf), list(stack))
            prev_significant = quote[-1]
            i = j
            continue
        if ch == "[":
            is_subscript = bool(
                prev_significant
                and (prev_significant.isalnum() or prev_significant in "_)]\"'")
            )
            stack.append(("[", is_subscript))
        elif ch == "(":
            stack.append(("(", False))
        elif ch == "{":
            stack.append(("{", False))
        elif ch in ")]}" and stack:
            stack.pop()
        if not ch.isspace():
            prev_significant = ch
        i += 1


def find_subscript_strings(code: str) -> list[str]:
    """String literals in dataframe-subscript position, lexically detected.

    A literal counts when its enclosing brackets, walking outward, are
    square all the way to a subscript `[` (covers df['a'], df[['a','b']],
    df.loc[:, 'a']); literals inside call parens or dict braces do not.
    """
    refs: list[str] = []
    for _, value, stack in _iter_strings_and_brackets(code):
        hit = False
        for kind, is_subscript in reversed(stack):
            if kind != "[":
                break
            if is_subscript:
                hit = True
                break
        if hit:
            refs.append(value)
    return refs


def _logical_lines(code: str) -> list[str]:
    """Join physical lines that continue inside brackets or after a backslash."""
    lines: list[str] = []
    depth = 0
    buf: list[str] = []
    for raw in code.splitlines():
        buf.append(raw)
        stripped_joined = " ".join(buf)
        depth = _bracket_depth(stripped_joined)
        if depth > 0 or raw.rstrip().endswith("\\"):
            continue
        lines.append("\n".join(buf))
        buf = []
    if buf:
        lines.append("\n".join(buf))
    return lines


def _bracket_depth(code: str) -> int:
    depth = 0
    quote: str | None = None
    i = 0
    n = len(code)
    while i < n:
        ch = code[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                continue
            if code.startswith(quote, i):
                i += len(quote)
                quote = None
                continue
            i += 1
            continue
        if ch in "\"'":
            triple = code[i : i + 3]
            quote = triple if triple in ('"""', "'''") else ch
            i += len(quote)
            continue
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        i += 1
    return depth


def _has_toplevel_assignment(line: str) -> bool:
    depth = 0
    quote: str | None = None
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if quote is not None:
            if ch == "\\":
                i += 2
                continue
            if line.startswith(quote, i):
                i += len(quote)
                quote = None
                continue
            i += 1
            continue
        if ch in "\"'":
            triple = line[i : i + 3]
            quote = triple if triple in ('"""', "'''") else ch
            i += len(quote)
            continue
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "=" and depth == 0:
            nxt = line[i + 1] if i + 1 < n else ""
            prv = line[i - 1] if i > 0 else ""
            if nxt == "=" or prv in "=!<>":
                i += 2
                continue
            return True  # plain or augmented assignment
        i += 1
    return False


def _is_expression_line(logical_line: str) -> bool:
    first_physical = logical_line.splitlines()[0]
    if first_physical != first_physical.lstrip():
        return False  # indented: body of a compound statement
    text = logical_line.strip()
    if not text:
        return False
    head = re.match(r"[A-Za-z_]+", text)
    if head and head.group() in _STATEMENT_KEYWORDS:
        return False
    flat = " ".join(logical_line.splitlines())
    return not _has_toplevel_assignment(flat)


def validate_code(snippet: str, profile: DatasetProfile) -> ValidationReport:
    """Check the two generated-code contracts: grounding and capturability."""
    cleaned = strip_comments(snippet)
    known = set(profile.column_names())
    violations: list[dict] = []

    grounded = True
    for ref in find_subscript_strings(cleaned):
        if ref not in known:
            grounded = False
            violations.append(
                {"kind": "unknown_column", "detail": f"column '{ref}' is not in the dataset"}
            )

    lines = [l for l in _logical_lines(cleaned) if l.strip()]
    expression_final = bool(lines) and _is_expression_line(lines[-1])
    if not expression_final:
        violations.append(
            {
                "kind": "not_expression_final",
                "detail": "the snippet does not end with a capturable expression",
            }
        )
    return ValidationReport(
        grounded=grounded, expression_final=expression_final, violations=violations
    )
