"""Session service, CLI, persistence, and the replay/report harness."""

from .api import create_app
from .replay import CaseResult, ReplayReport, ReplayRow, compute_report, run_replay
from .scenarios import Scenario, load_catalog, load_scenario, packaged_scenario_names
from .session import ConcurrentPrompt, Session, SessionManager, UnknownSession
from .store import append_event, list_session_ids, read_events

__all__ = [
    "CaseResult",
    "ConcurrentPrompt",
    "ReplayReport",
    "ReplayRow",
    "Scenario",
    "Session",
    "SessionManager",
    "UnknownSession",
    "append_event",
    "compute_report",
    "create_app",
    "list_session_ids",
    "load_catalog",
    "load_scenario",
    "packaged_scenario_names",
    "read_events",
    "run_replay",
]
