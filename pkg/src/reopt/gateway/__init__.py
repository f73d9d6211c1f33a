"""Planner/selector transport: prompt assembly, OpenAI-compatible client,
JSON extraction, and the scripted mock used by the offline test suite."""

from ..jsontools import extract_json
from .client import GatewayConfig, chat_complete, config_from_env
from .mock import MockEntry, MockScript, ScriptedPlanner, ScriptedSelector
from .prompts import (
    DELTA_MARKER,
    PLANNER_SYSTEM_INSTRUCTION,
    REPAIR_PRELUDE,
    SELECTOR_SYSTEM_INSTRUCTION,
    assemble_planner_prompt,
    assemble_selector_prompt,
    render_repair_context,
)
from .types import ChatRequest

__all__ = [
    "ChatRequest",
    "DELTA_MARKER",
    "GatewayConfig",
    "MockEntry",
    "MockScript",
    "PLANNER_SYSTEM_INSTRUCTION",
    "REPAIR_PRELUDE",
    "SELECTOR_SYSTEM_INSTRUCTION",
    "ScriptedPlanner",
    "ScriptedSelector",
    "assemble_planner_prompt",
    "assemble_selector_prompt",
    "chat_complete",
    "config_from_env",
    "extract_json",
    "render_repair_context",
]
