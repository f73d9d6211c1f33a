"""Service harness: HTTP API, persistence, CLI, replay reports."""

import json

import pytest
from fastapi.testclient import TestClient

from reopt.errors import StoreCorruption, UnknownScenario
from reopt.service import (
    SessionManager,
    create_app,
    load_catalog,
    load_scenario,
    run_replay,
)
from reopt.service.cli import main as cli_main
from reopt.service.store import append_event, read_events, session_file

P2_DELTA = ("There is an unexpected shortage of trucks for deliveries from "
            "Plant 2 to Customer 2 this week. The maximum that can be shipped "
            "on this route is 5 units.")
P1_DELTA = ("Plant 1 is going into urgent maintenance for the next two days, "
            "so it cannot ship anything.")
P3_DELTA = ("Customer 3 has placed an urgent order of 10 additional units on "
            "top of their normal demand.")


@pytest.fixture
def client(tmp_path):
    app = create_app(store_dir=str(tmp_path / "store"))
    with TestClient(app) as c:
        c.store_dir = str(tmp_path / "store")
        yield c


class TestScenarios:
    def test_packaged_name(self):
        scenario = load_scenario("toy")
        assert scenario.name == "toy"
        assert scenario.preset == "toy-default"

    def test_path_and_unknown(self, tmp_path):
        with pytest.raises(UnknownScenario):
            load_scenario("never-heard-of-it")
        target = tmp_path / "copy.json"
        target.write_text(json.dumps(load_scenario("toy").doc))
        assert load_scenario(target).state == load_scenario("toy").state

    def test_catalog_validation(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps([{"delta": "no id"}]))
        with pytest.raises(UnknownScenario) as err:
            load_catalog(bad)
        assert "entry 0" in str(err.value)


class TestHttpApi:
    def test_create_toy_session_returns_baseline(self, client):
        response = client.post("/sessions", json={"scenario": "toy"})
        assert response.status_code == 201
        body = response.json()
        assert body["objective"] == pytest.approx(162.0, abs=1e-6)
        assert body["version"] == 0

    def test_prompt_p3_reaches_192(self, client):
        sid = client.post("/sessions", json={"scenario": "toy"}).json()["session_id"]
        response = client.post(f"/sessions/{sid}/prompts", json={
            "delta": "Customer 3 has placed an urgent order of 10 additional "
                     "units on top of their normal demand."})
        assert response.status_code == 200
        body = response.json()
        assert body["outcome"]["status"] == "succeeded"
        assert body["objective"] == pytest.approx(192.0, abs=1e-6)
        assert body["previous_objective"] == pytest.approx(162.0, abs=1e-6)

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/ghost").status_code == 404
        assert client.post("/sessions/ghost/prompts",
                           json={"delta": "x"}).status_code == 404

    def test_malformed_body_422_with_field_detail(self, client):
        sid = client.post("/sessions", json={"scenario": "toy"}).json()["session_id"]
        response = client.post(f"/sessions/{sid}/prompts", json={"budget": 2})
        assert response.status_code == 422
        assert any("delta" in str(item.get("loc")) for item in response.json()["detail"])

    def test_concurrent_prompt_conflict(self, client):
        sid = client.post("/sessions", json={"scenario": "toy"}).json()["session_id"]
        manager = client.app.state.manager
        session = manager.get(sid)
        assert session.lock.acquire(blocking=False)
        try:
            response = client.post(f"/sessions/{sid}/prompts", json={"delta": P2_DELTA})
            assert response.status_code == 409
        finally:
            session.lock.release()

    def test_history_and_diff(self, client):
        sid = client.post("/sessions", json={"scenario": "toy"}).json()["session_id"]
        client.post(f"/sessions/{sid}/prompts", json={"delta": P1_DELTA})
        history = client.get(f"/sessions/{sid}/history").json()
        assert [e["type"] for e in history["events"]] == ["created", "step"]
        diff = client.get(f"/sessions/{sid}/diff/1").json()
        paths = {".".join(e["path"]) for e in diff["entries"]}
        assert "parameters.supply.P1" in paths
        assert client.get(f"/sessions/{sid}/diff/7").status_code == 404

    def test_health(self, client):
        assert client.get("/health").status_code == 200

    def test_restart_restores_version_objective_diffs(self, client):
        sid = client.post("/sessions", json={"scenario": "toy"}).json()["session_id"]
        first = client.post(f"/sessions/{sid}/prompts", json={"delta": P2_DELTA}).json()
        assert first["objective"] == pytest.approx(184.0, abs=1e-6)
        diff_before = client.get(f"/sessions/{sid}/diff/1").json()

        restarted = TestClient(create_app(store_dir=client.store_dir))
        summary = restarted.get(f"/sessions/{sid}").json()
        assert summary["version"] == 1
        assert summary["objective"] == pytest.approx(184.0, abs=1e-6)
        diff_after = restarted.get(f"/sessions/{sid}/diff/1").json()
        assert diff_after["entries"] == diff_before["entries"]


class TestPersistence:
    def test_three_events_survive_restart(self, tmp_path):
        # P2 then P3 compose feasibly (route cap, then extra demand)
        store = str(tmp_path)
        manager = SessionManager(store_dir=store)
        session = manager.create("toy", session_id="s1")
        manager.prompt("s1", P2_DELTA)
        manager.prompt("s1", P3_DELTA)

        fresh = SessionManager(store_dir=store)
        restored = fresh.restore("s1")
        assert restored.version == session.version == 2
        assert restored.solution.objective == pytest.approx(
            manager.get("s1").solution.objective, abs=1e-9)
        assert restored.state == manager.get("s1").state

    def test_truncated_tail_tolerated(self, tmp_path):
        store = str(tmp_path)
        manager = SessionManager(store_dir=store)
        manager.create("toy", session_id="s1")
        manager.prompt("s1", P1_DELTA)
        path = session_file(store, "s1")
        path.write_text(path.read_text()[:-40])  # crash mid-append
        fresh = SessionManager(store_dir=store)
        restored = fresh.restore("s1")
        assert restored.truncated_store is True
        assert restored.version == 0  # only the complete created record remains

    def test_checksum_corruption_detected(self, tmp_path):
        store = str(tmp_path)
        append_event(store, "s1", {"type": "created", "x": 1})
        append_event(store, "s1", {"type": "step", "x": 2})
        path = session_file(store, "s1")
        lines = path.read_text().splitlines()
        lines[0] = lines[0].replace('"x":1', '"x":9')
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(StoreCorruption):
            read_events(store, "s1")

    def test_restore_p1_reproduces_174(self, tmp_path):
        store = str(tmp_path)
        manager = SessionManager(store_dir=store)
        manager.create("toy", session_id="s1")
        manager.prompt("s1", P1_DELTA)
        fresh = SessionManager(store_dir=store)
        restored = fresh.restore("s1")
        assert restored.solution.objective == pytest.approx(174.0, abs=1e-6)


class TestReplay:
    def test_toy_catalog_all_green(self):
        report = run_replay("toy", "toy_catalog", planner="mock")
        assert report.aggregates["scored_rows"] == 3
        assert report.aggregates["criteria_counts"]["final_success"] == 3
        objectives = {r.prompt_id: r.objective for r in report.rows}
        assert objectives["P1"] == pytest.approx(174.0, abs=1e-6)
        assert objectives["P2"] == pytest.approx(184.0, abs=1e-6)
        assert objectives["P3"] == pytest.approx(192.0, abs=1e-6)
        assert all(r.delta_obj == pytest.approx(0.0, abs=1e-6) for r in report.rows)

    def test_no_selector_variant_forces_scratch(self):
        report = run_replay("toy", "toy_catalog", variant="patch-no-selector",
                            planner="mock")
        assert report.aggregates["criteria_counts"]["final_success"] == 3
        assert all(r.strategy == "scratch" for r in report.rows)

    def test_missing_reference_excluded(self, tmp_path):
        catalog = load_catalog("toy_catalog")
        catalog.append({"prompt_id": "P9", "delta": "unscored prompt"})
        path = tmp_path / "cat.json"
        path.write_text(json.dumps(catalog))
        report = run_replay("toy", path, planner="mock")
        assert report.aggregates["total_rows"] == 4
        assert report.aggregates["scored_rows"] == 3
        unscored = next(r for r in report.rows if r.prompt_id == "P9")
        assert unscored.missing_reference

    def test_domain_metrics_evaluated(self, tmp_path):
        from reopt.agents import register_metric

        register_metric("active_flows", lambda state, inst, res: float(
            sum(1 for v in res.assignment.values() if v > 1e-9)))
        catalog = load_catalog("toy_catalog")
        catalog[0]["domain_metrics"] = ["active_flows", "unregistered_metric"]
        path = tmp_path / "cat.json"
        path.write_text(json.dumps(catalog))
        report = run_replay("toy", path, planner="mock")
        row = next(r for r in report.rows if r.prompt_id == "P1")
        assert row.domain_metrics["active_flows"] == 3.0
        assert row.domain_metrics["unregistered_metric"] is None

    def test_report_nesting_holds(self):
        report = run_replay("toy", "toy_catalog", planner="mock")
        counts = report.aggregates["criteria_counts"]
        assert counts["final_success"] <= counts["prompt_satisfied"] \
            <= counts["update_correct"]
        assert counts["first_attempt_success"] <= counts["final_success"]

    def test_exports(self, tmp_path):
        report = run_replay("toy", "toy_catalog", planner="mock")
        doc = json.loads(report.to_json())
        assert len(doc["rows"]) == 3
        csv_text = report.to_csv()
        assert csv_text.splitlines()[0].startswith("prompt_id,")
        assert len(csv_text.splitlines()) == 4
        assert "P1" in report.text_table()


class TestCli:
    def test_solve_prints_162(self, capsys):
        assert cli_main(["solve", "toy"]) == 0
        out = capsys.readouterr().out
        assert "objective: 162.0" in out

    def test_export_lp(self, capsys):
        assert cli_main(["export-lp", "toy"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("\\ Problem name: toy")
        assert "Subject To" in out

    def test_replay_writes_reports(self, tmp_path, capsys):
        code = cli_main(["replay", "toy", "toy_catalog", "--planner", "mock",
                         "--out", str(tmp_path / "rep")])
        assert code == 0
        out = capsys.readouterr().out
        assert "final_success=1.000" in out
        assert (tmp_path / "rep" / "report.json").is_file()
        assert (tmp_path / "rep" / "rows.csv").is_file()

    def test_prompt_against_stored_session(self, tmp_path, capsys):
        store = str(tmp_path / "store")
        manager = SessionManager(store_dir=store)
        manager.create("toy", session_id="sess1")
        code = cli_main(["prompt", "sess1", P2_DELTA, "--store", store])
        assert code == 0
        out = capsys.readouterr().out
        assert "162.0 -> 184.0" in out

    def test_unknown_scenario_exit_1(self, capsys):
        assert cli_main(["solve", "no-such-thing"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exit_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            cli_main(["replay", "toy", "toy_catalog", "--variant", "nonsense"])
        assert err.value.code == 2
        capsys.readouterr()

    def test_prompt_json_output(self, capsys):
        code = cli_main(["prompt", "toy", P1_DELTA, "--json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["outcome"]["status"] == "succeeded"
        assert doc["objective"] == pytest.approx(174.0, abs=1e-6)


class TestComputeReportShape:
    def test_zero_delta_rows(self):
        # a row whose objective equals the reference has delta 0 and gap 0
        report = run_replay("exam_toy", "exam_catalog", planner="mock")
        for row in report.rows:
            assert row.delta_obj == pytest.approx(0.0, abs=1e-6)
            assert row.ref_gap_pct == pytest.approx(0.0, abs=1e-6)


class TestApiCliParity:
    def test_same_step_outcome_both_ways(self, tmp_path, capsys):
        app = create_app(store_dir=str(tmp_path / "api_store"))
        with TestClient(app) as client:
            sid = client.post("/sessions",
                              json={"scenario": "toy"}).json()["session_id"]
            api_body = client.post(f"/sessions/{sid}/prompts",
                                   json={"delta": P1_DELTA}).json()

        assert cli_main(["prompt", "toy", P1_DELTA, "--json"]) == 0
        cli_body = json.loads(capsys.readouterr().out)

        api_outcome, cli_outcome = api_body["outcome"], cli_outcome_strip(cli_body)
        for key in ("status", "applied_action_set", "new_state_version",
                    "attempts_used"):
            assert api_outcome[key] == cli_outcome[key]
        assert api_outcome["solution"]["objective"] == \
            cli_outcome["solution"]["objective"]
        assert api_body["diff"] == cli_body["diff"]
        assert api_body["strategy"] == cli_body["strategy"]


def cli_outcome_strip(cli_body):
    return cli_body["outcome"]
