"""Drive the engine over a task suite and score the outcomes.

Scoring is pure over (task, record): route mismatch is a
misclassification, a code turn without an ok artifact is an execution
error, and otherwise the task's checker decides. The scoring document is
canonical JSON so replays of the same fixture are byte-identical;
latency figures are reported separately because they are wall-clock.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from ..dialogue import LatencyReport, TurnFailed, TurnRecord, compute_model_only_time
from .suites import TaskSpec

log = logging.getLogger(__name__)

FAILURE_KINDS = ("misclassification", "execution_error", "wrong_result")


@dataclass(frozen=True)
class Verdict:
    correct: bool
    failure_kind: str | None = None

    def __post_init__(self):
        if self.correct and self.failure_kind is not None:
            raise ValueError("correct verdicts carry no failure kind")
        if self.failure_kind is not None and self.failure_kind not in FAILURE_KINDS:
            raise ValueError(f"unknown failure kind {self.failure_kind!r}")


def _check_axes(checker: dict, record: TurnRecord) -> bool:
    artifact = record.artifact
    if artifact is None or artifact.kind != "figure" or not artifact.axes:
        return False
    for key in ("title", "x_label", "y_label"):
        if key in checker and artifact.axes.get(key) != checker[key]:
            return False
    return True


def _check_numeric(checker: dict, record: TurnRecord) -> bool:
    artifact = record.artifact
    if artifact is None or artifact.kind != "scalar":
        return False
    try:
        value = float(artifact.payload)
    except (TypeError, ValueError):
        return False
    return abs(value - float(checker["expected"])) <= float(checker["tolerance"])


def score_turn(task: TaskSpec, record: TurnRecord) -> Verdict:
    if record.decision.action != task.expected_route:
        return Verdict(False, "misclassification")

    if task.expected_route == "code_generation":
        artifact = record.artifact
        if artifact is None or artifact.status != "ok":
            return Verdict(False, "execution_error")
        checker = task.checker
        kind = checker["type"]
        if kind == "artifact_kind":
            ok = artifact.kind == checker["kind"]
        elif kind == "numeric_value":
            ok = _check_numeric(checker, record)
        elif kind == "axes_labels":
            ok = _check_axes(checker, record)
        else:  # narration checker on a code route can never hold
            ok = False
        return Verdict(ok, None if ok else "wrong_result")

    ok = bool(record.narration and record.narration.strip()) and not record.narration_is_error
    return Verdict(ok, None if ok else "wrong_result")


@dataclass
class SuiteReport:
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    routes: dict[str, str] = field(default_factory=dict)
    categories: dict[str, str] = field(default_factory=dict)
    datasets: dict[str, str] = field(default_factory=dict)
    expected_routes: dict[str, str] = field(default_factory=dict)
    latency: dict[str, LatencyReport] = field(default_factory=dict)
    model_name: str = ""

    # -- tallies ----------------------------------------------------------

    def _expected(self, route: str) -> list[str]:
        return [t for t, r in self.expected_routes.items() if r == route]

    @property
    def code_total(self) -> int:
        return len(self._expected("code_generation"))

    @property
    def chat_total(self) -> int:
        return len(self._expected("chat_response"))

    @property
    def code_correct(self) -> int:
        return sum(
            self.verdicts[t].correct for t in self._expected("code_generation")
        )

    @property
    def chat_correct(self) -> int:
        return sum(self.verdicts[t].correct for t in self._expected("chat_response"))

    @property
    def misclassifications(self) -> int:
        return sum(
            v.failure_kind == "misclassification" for v in self.verdicts.values()
        )

    @property
    def exec_errors(self) -> int:
        return sum(v.failure_kind == "execution_error" for v in self.verdicts.values())

    @property
    def overall_correct(self) -> int:
        return sum(v.correct for v in self.verdicts.values())

    @property
    def overall_total(self) -> int:
        return len(self.verdicts)

    @property
    def overall_fraction(self) -> float:
        return self.overall_correct / self.overall_total if self.overall_total else 0.0

    def category_tallies(self) -> dict[str, dict[str, int]]:
        tallies: dict[str, dict[str, int]] = {}
        for task_id, verdict in self.verdicts.items():
            bucket = tallies.setdefault(
                self.categories[task_id], {"correct": 0, "total": 0}
            )
            bucket["total"] += 1
            bucket["correct"] += int(verdict.correct)
        return tallies

    # -- rendering ----------------------------------------------------------

    def scoring_document(self) -> str:
        """Canonical JSON for the deterministic part of the report."""
        doc = {
            "model_name": self.model_name,
            "tasks": {
                task_id: {
                    "correct": verdict.correct,
                    "failure_kind": verdict.failure_kind,
                    "route": self.routes[task_id],
                    "expected_route": self.expected_routes[task_id],
                    "category": self.categories[task_id],
                    "dataset": self.datasets[task_id],
                }
                for task_id, verdict in self.verdicts.items()
            },
            "summary": {
                "code_correct": self.code_correct,
                "code_total": self.code_total,
                "chat_correct": self.chat_correct,
                "chat_total": self.chat_total,
                "misclassifications": self.misclassifications,
                "exec_errors": self.exec_errors,
                "overall_correct": self.overall_correct,
                "overall_total": self.overall_total,
                "category_tallies": self.category_tallies(),
            },
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    def to_document(self) -> dict:
        doc = json.loads(self.scoring_document())
        doc["latency"] = {name: rep.to_dict() for name, rep in self.latency.items()}
        return doc

    def render_table(self) -> str:
        lines = [
            f"model: {self.model_name}",
            f"code:  {self.code_correct}/{self.code_total}",
            f"chat:  {self.chat_correct}/{self.chat_total}",
            f"misclassifications: {self.misclassifications}",
            f"exec errors:        {self.exec_errors}",
            f"overall: {self.overall_correct}/{self.overall_total} "
            f"({100.0 * self.overall_fraction:.1f}%)",
        ]
        if self.latency:
            lines.append("")
            lines.append(
                f"{'dataset':<12}{'decision':>9}{'code':>8}{'exec':>8}"
                f"{'chat':>8}{'tts':>8}{'model-only':>12}"
            )
            for name in sorted(self.latency):
                rep = self.latency[name]
                m = rep.stage_means
                lines.append(
                    f"{name:<12}{m['decision']:>9.3f}{m['code_gen']:>8.3f}"
                    f"{m['exec']:>8.3f}{m['chat']:>8.3f}{m['tts']:>8.3f}"
                    f"{rep.t_model:>12.3f}"
                )
        return "\n".join(lines)


def run_suite(
    tasks: list[TaskSpec],
    engine,
    dataset_ids: dict[str, str],
    want_audio: bool = False,
) -> SuiteReport:
    """One fresh-session turn per task; individual failures never abort the run."""
    report = SuiteReport(model_name=getattr(engine.gateway, "model_name", ""))
    records: dict[str, list[TurnRecord]] = {}
    for task in tasks:
        if task.dataset not in dataset_ids:
            raise KeyError(f"task {task.id}: dataset {task.dataset!r} not ingested")
        session_id = engine.create_session(dataset_ids[task.dataset])
        try:
            record = engine.handle_turn(session_id, text=task.query, want_audio=want_audio)
            verdict = score_turn(task, record)
            report.routes[task.id] = record.decision.action
            records.setdefault(task.dataset, []).append(record)
        except TurnFailed as exc:
            log.warning("task %s failed at turn level: %s", task.id, exc)
            verdict = Verdict(False, "execution_error")
            report.routes[task.id] = "none"
        finally:
            engine.close_session(session_id)
        report.verdicts[task.id] = verdict
        report.categories[task.id] = task.category
        report.datasets[task.id] = task.dataset
        report.expected_routes[task.id] = task.expected_route
    for dataset, dataset_records in records.items():
        report.latency[dataset] = compute_model_only_time(dataset_records)
    return report
