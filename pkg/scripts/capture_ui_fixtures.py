"""Capture UI test fixtures from a live toy session.

Runs the real ASGI app in-process and saves the exact JSON payloads the
frontend consumes, so the vitest suite asserts against genuine server
responses. Re-run after changing any API shape:

    python3 scripts/capture_ui_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from reopt.service import create_app, run_replay

P1_DELTA = ("Plant 1 is going into urgent maintenance for the next two days, "
            "so it cannot ship anything.")
P2_DELTA = ("There is an unexpected shortage of trucks for deliveries from "
            "Plant 2 to Customer 2 this week. The maximum that can be shipped "
            "on this route is 5 units.")

OUT = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as store:
        client = TestClient(create_app(store_dir=store))

        created = client.post("/sessions", json={"scenario": "toy",
                                                 "session_id": "fixture"}).json()
        p1 = client.post("/sessions/fixture/prompts", json={"delta": P1_DELTA}).json()

        client.post("/sessions", json={"scenario": "toy", "session_id": "fixture2"})
        p2 = client.post("/sessions/fixture2/prompts", json={"delta": P2_DELTA}).json()
        p2_diff = client.get("/sessions/fixture2/diff/1").json()
        p2_summary = client.get("/sessions/fixture2").json()

        history = client.get("/sessions/fixture/history").json()
        summary = client.get("/sessions/fixture").json()
        diff = client.get("/sessions/fixture/diff/1").json()

        # a failing step for banner rendering: P1 again makes P2's cap infeasible
        client.post("/sessions/fixture2/prompts", json={"delta": P1_DELTA})
        failed_history = client.get("/sessions/fixture2/history").json()

    report = run_replay("toy", "toy_catalog", planner="mock").to_doc()

    fixtures = {
        "created.json": created,
        "p1_step.json": p1,
        "p2_step.json": p2,
        "p2_diff.json": p2_diff,
        "p2_summary.json": p2_summary,
        "history.json": history,
        "summary.json": summary,
        "diff_v1.json": diff,
        "failed_history.json": failed_history,
        "replay_report.json": report,
    }
    for name, doc in fixtures.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
