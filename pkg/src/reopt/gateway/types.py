"""Chat-request value type shared by the real client and the mocks."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    model: str = "default"
    temperature: float = 0.0
    max_tokens: int = 4096
    timeout: float = 60.0

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not self.system or not self.user:
            raise ValueError("system and user text must be non-empty")
