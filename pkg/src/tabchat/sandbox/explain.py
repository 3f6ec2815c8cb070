"""Turn sandbox failures into short, user-facing explanations."""

from __future__ import annotations

import re

_BLOCKED_MODULE_RE = re.compile(r"import of '([^']+)'")
_KEYERROR_RE = re.compile(r"^KeyError: (.+)$")
_EXCEPTION_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*Error[A-Za-z0-9_]*|Exception):?\s*(.*)$")


def summarize_error(status: str, raw_traceback: str = "") -> str:
    """One or two sentences naming what failed and suggesting a way forward.

    Never echoes stack frames; at most the final exception line informs
    the wording.
    """
    last_line = _last_line(raw_traceback)

    if status == "timeout":
        return (
            "The computation exceeded the sandbox time limit. "
            "Try a simpler request or a smaller slice of the data."
        )
    if status == "resource_limit":
        return (
            "The computation needed more memory than the sandbox allows. "
            "Try aggregating or sampling the data first."
        )
    if status == "blocked_import":
        module = None
        match = _BLOCKED_MODULE_RE.search(raw_traceback)
        if match:
            module = match.group(1)
        what = f"the library '{module}'" if module else "a library"
        return (
            f"That analysis needs {what}, which the sandbox does not allow. "
            "Try rephrasing it around the built-in dataframe and plotting tools."
        )
    if status == "protocol_error":
        return (
            "The analysis runtime hit an internal problem and was restarted. "
            "Please try the request again."
        )

    key_match = _KEYERROR_RE.match(last_line)
    if key_match:
        key = key_match.group(1).strip().strip("'\"")
        return (
            f"The code looked for '{key}', which is not in this dataset. "
            "Check the column name and try again."
        )
    exc_match = _EXCEPTION_RE.match(last_line)
    if exc_match:
        name, message = exc_match.groups()
        detail = f"{name}: {message}" if message else name
        return (
            f"The code failed while running ({detail}). "
            "Try rephrasing the request or narrowing it down."
        )
    return (
        "The code failed while running. "
        "Try rephrasing the request or narrowing it down."
    )


def _last_line(text: str) -> str:
    for line in reversed(text.strip().splitlines()):
        if line.strip():
            return line.strip()
    return ""
