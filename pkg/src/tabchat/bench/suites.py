"""Task suites: the line-delimited task file format and the default suite
built from the catalog, with numeric ground truths computed straight from
the dataset files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from .catalog import CATALOG

CATEGORIES = ("visualization", "analytical", "narrative")
CHECKER_TYPES = ("artifact_kind", "numeric_value", "axes_labels", "narration_nonempty")
NUMERIC_TOLERANCE = 1e-6


class BadSuite(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    id: str
    dataset: str
    query: str
    category: str
    expected_route: str
    checker: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise BadSuite(f"task {self.id}: unknown category {self.category!r}")
        narrative = self.category == "narrative"
        chat = self.expected_route == "chat_response"
        if narrative != chat:
            raise BadSuite(
                f"task {self.id}: narrative tasks and only narrative tasks "
                "expect the chat route"
            )
        if self.checker.get("type") not in CHECKER_TYPES:
            raise BadSuite(f"task {self.id}: unknown checker {self.checker.get('type')!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset,
            "query": self.query,
            "category": self.category,
            "expected_route": self.expected_route,
            "checker": dict(self.checker),
        }


def _route_for(category: str) -> str:
    return "chat_response" if category == "narrative" else "code_generation"


def _ground_truth(descriptor: tuple, df: pd.DataFrame) -> float:
    op = descriptor[0]
    if op == "mean":
        return float(df[descriptor[1]].mean())
    if op == "max":
        return float(df[descriptor[1]].max())
    if op == "sum":
        return float(df[descriptor[1]].sum())
    if op == "count_eq":
        return float((df[descriptor[1]] == descriptor[2]).sum())
    if op == "count_gt":
        return float((df[descriptor[1]] > descriptor[2]).sum())
    if op == "id_of_max":
        return float(df.loc[df[descriptor[1]].idxmax(), descriptor[2]])
    raise BadSuite(f"unknown ground-truth op {op!r}")


def _checker_dict(entry, frames: dict[str, pd.DataFrame]) -> dict:
    kind = entry.checker[0]
    if kind == "axes":
        return {"type": "axes_labels", **entry.checker[1]}
    if kind == "kind":
        return {"type": "artifact_kind", "kind": entry.checker[1]}
    if kind == "numeric":
        expected = _ground_truth(entry.checker[1], frames[entry.dataset])
        return {
            "type": "numeric_value",
            "expected": expected,
            "tolerance": NUMERIC_TOLERANCE,
        }
    if kind == "narration":
        return {"type": "narration_nonempty"}
    raise BadSuite(f"unknown checker descriptor {kind!r}")


def build_default_suite(dataset_paths: dict[str, str | Path]) -> list[TaskSpec]:
    """The shipped 48-task suite, ground truths recomputed from the files."""
    frames = {name: pd.read_csv(path) for name, path in dataset_paths.items()}
    tasks = []
    for entry in CATALOG:
        tasks.append(
            TaskSpec(
                id=entry.id,
                dataset=entry.dataset,
                query=entry.query,
                category=entry.category,
                expected_route=_route_for(entry.category),
                checker=_checker_dict(entry, frames),
            )
        )
    return tasks


def save_suite(tasks: list[TaskSpec], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps(task.to_dict()) + "\n")
    return path


def load_suite(path: str | Path) -> list[TaskSpec]:
    """Parse a line-delimited suite file; raises BadSuite on anything off."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BadSuite(f"cannot read suite file: {exc}") from exc
    tasks = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BadSuite(f"line {lineno}: not valid JSON: {exc}") from exc
        try:
            task = TaskSpec(
                id=str(doc["id"]),
                dataset=str(doc["dataset"]),
                query=str(doc["query"]),
                category=str(doc["category"]),
                expected_route=str(doc["expected_route"]),
                checker=dict(doc.get("checker", {})),
            )
        except KeyError as exc:
            raise BadSuite(f"line {lineno}: missing field {exc}") from exc
        if task.id in seen:
            raise BadSuite(f"line {lineno}: duplicate task id {task.id}")
        seen.add(task.id)
        tasks.append(task)
    if not tasks:
        raise BadSuite("suite file holds no tasks")
    return tasks


def category_histogram(tasks: list[TaskSpec]) -> dict[str, int]:
    counts = {c: 0 for c in CATEGORIES}
    for task in tasks:
        counts[task.category] += 1
    return counts
