"""Conversational analytics engine for tabular datasets.

Each user turn is routed between generated analysis code, executed in a
guarded sandbox, and grounded narration, with sliding-window dialogue
memory, optional speech in/out, and a benchmark harness.
"""

from .config import EngineConfig, load_config
from .context import AlignedUtterance, ContextPack, align_terms, build_context_pack
from .dialogue import (
    LatencyReport,
    SessionState,
    StageTimings,
    TurnRecord,
    compute_model_only_time,
    context_window,
)
from .engine import Engine
from .gateway import Completion, CompletionRequest, HttpGateway, ScriptedGateway, load_script
from .profiling import Caps, ColumnProfile, DatasetProfile, Unparseable, ingest_dataset
from .prompts import (
    RenderedPrompt,
    ValidationReport,
    render_chat_prompt,
    render_code_prompt,
    render_decision_prompt,
    validate_code,
)
from .router import Decision, decide, parse_decision
from .sandbox import ExecutionResult, SandboxPolicy, SandboxSupervisor, summarize_error

__version__ = "0.1.0"

__all__ = [
    "AlignedUtterance",
    "Caps",
    "ColumnProfile",
    "Completion",
    "CompletionRequest",
    "ContextPack",
    "DatasetProfile",
    "Decision",
    "Engine",
    "EngineConfig",
    "ExecutionResult",
    "HttpGateway",
    "LatencyReport",
    "RenderedPrompt",
    "SandboxPolicy",
    "SandboxSupervisor",
    "ScriptedGateway",
    "SessionState",
    "StageTimings",
    "TurnRecord",
    "Unparseable",
    "ValidationReport",
    "align_terms",
    "build_context_pack",
    "compute_model_only_time",
    "context_window",
    "decide",
    "ingest_dataset",
    "load_config",
    "load_script",
    "parse_decision",
    "render_chat_prompt",
    "render_code_prompt",
    "render_decision_prompt",
    "summarize_error",
    "validate_code",
]
