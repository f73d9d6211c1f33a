"""HTTP session service: synchronous prompt handling, one writer per
session, event history and diffs for audit, optional static UI bundle."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import ReoptError, UnknownScenario
from .session import ConcurrentPrompt, SessionManager, UnknownSession


class CreateSessionBody(BaseModel):
    scenario: Union[str, dict] = "toy"
    session_id: Optional[str] = None


class PromptBody(BaseModel):
    delta: str = Field(min_length=1)
    budget: int = Field(default=2, ge=1, le=10)
    checks: list[dict] = Field(default_factory=list)
    planner: str = Field(default="mock")
    strategy: Optional[str] = None
    backend: str = Field(default="builtin")


def create_app(store_dir: Optional[str] = None,
               ui_dist: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="reopt session service", version="0.1.0")
    manager = SessionManager(store_dir=store_dir)
    if store_dir:
        manager.restore_all()
    app.state.manager = manager

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": len(manager.sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            session = manager.create(body.scenario, session_id=body.session_id)
        except UnknownScenario as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ReoptError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "session_id": session.id,
            "scenario_name": session.scenario.name,
            "version": session.version,
            "objective": session.solution.objective,
            "baseline": session.solution.to_doc(),
        }

    @app.post("/sessions/{session_id}/prompts")
    def post_prompt(session_id: str, body: PromptBody):
        try:
            return manager.prompt(
                session_id, body.delta, budget=body.budget, checks=body.checks,
                planner=body.planner, strategy=body.strategy, backend=body.backend)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ConcurrentPrompt as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ReoptError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return manager.get(session_id).summary()
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        try:
            session = manager.get(session_id)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"session_id": session_id, "events": session.events}

    @app.get("/sessions/{session_id}/diff/{version}")
    def get_diff(session_id: str, version: int):
        try:
            diff = manager.diff_doc(session_id, version)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"session_id": session_id, "from_version": version - 1,
                "to_version": version, "entries": diff.to_doc()}

    dist = Path(ui_dist) if ui_dist else Path("frontend/dist")
    if dist.is_dir():
        app.mount("/ui", StaticFiles(directory=str(dist), html=True), name="ui")

    return app
