"""Guarded execution of generated code: policy, wire protocol, supervisor."""

from .policy import SandboxPolicy
from .protocol import ExecutionResult, FrameError
from .supervisor import SandboxSupervisor
from .explain import summarize_error

__all__ = [
    "SandboxPolicy",
    "ExecutionResult",
    "FrameError",
    "SandboxSupervisor",
    "summarize_error",
]
