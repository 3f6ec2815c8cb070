"""Benchmark harness: task suites, fixture gateways, scoring, reports."""

from .suites import TaskSpec, BadSuite, load_suite, save_suite, build_default_suite
from .runner import Verdict, SuiteReport, score_turn, run_suite

__all__ = [
    "TaskSpec",
    "BadSuite",
    "load_suite",
    "save_suite",
    "build_default_suite",
    "Verdict",
    "SuiteReport",
    "score_turn",
    "run_suite",
]
