"""Execution policy for the guarded runtime."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_WHITELIST = ("pandas", "numpy", "matplotlib", "seaborn")


@dataclass(frozen=True)
class SandboxPolicy:
    whitelist: tuple[str, ...] = DEFAULT_WHITELIST
    timeout: float = 15.0
    cpu_limit: float = 15.0
    memory_limit: int = 1024 * 1024 * 1024
    network_allowed: bool = False
    filesystem_allowed: bool = False

    def __post_init__(self):
        if self.network_allowed:
            raise ValueError("network access cannot be enabled in the sandbox")
        if self.filesystem_allowed:
            raise ValueError("filesystem access cannot be enabled in the sandbox")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        object.__setattr__(self, "whitelist", tuple(self.whitelist))
