"""The reopt command-line interface.

Exit codes: 0 success, 1 operational failure, 2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ReoptError
from ..model.instantiate import instantiate
from ..model.lp_format import write_lp
from ..solve.backends import solve
from ..solve.types import SolverConfig
from ..toolbox.presets import load_preset
from .replay import run_replay
from .scenarios import load_scenario
from .session import SessionManager
from .store import list_session_ids

STRATEGIES = ("auto", "scratch", "warm", "warm+tuned", "tuned",
              "fix_and_release", "heuristic_warm")


def _print_solve_result(result, as_json: bool):
    if as_json:
        print(json.dumps(result.to_doc(), indent=2))
        return
    print(f"status:    {result.status}")
    print(f"objective: {result.objective}")
    print(f"bound:     {result.best_bound}  gap: {result.gap}")
    print(f"time:      {result.wall_time:.3f}s  nodes: {result.node_count}")
    if result.assignment:
        active = {k: v for k, v in sorted(result.assignment.items()) if abs(v) > 1e-9}
        print(f"active variables ({len(active)}):")
        for key, value in active.items():
            print(f"  {key} = {value:g}")


def _print_diff(diff_doc):
    if not diff_doc:
        print("diff: (empty)")
        return
    print("diff:")
    for entry in diff_doc:
        path = ".".join(entry["path"])
        print(f"  {path}: {entry['before']} -> {entry['after']}")


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    config = SolverConfig()
    if args.preset:
        config = load_preset(args.preset, base=config)
    else:
        config = scenario.tuned_config(config) or config
    result = solve(instantiate(scenario.state), config, backend=args.backend)
    _print_solve_result(result, args.json)
    return 0 if result.has_incumbent else 1


def cmd_prompt(args) -> int:
    manager = SessionManager(store_dir=args.store)
    if args.store and args.target in list_session_ids(args.store):
        manager.restore(args.target)
        session_id = args.target
    else:
        session = manager.create(args.target)
        session_id = session.id
        if not args.json:
            print(f"session {session_id} baseline objective: "
                  f"{session.solution.objective}")
    checks = json.loads(Path(args.checks).read_text()) if args.checks else []
    response = manager.prompt(
        session_id, args.delta, budget=args.budget, checks=checks,
        planner=args.planner,
        strategy=None if args.strategy == "auto" else args.strategy)
    if args.json:
        print(json.dumps(response, indent=2))
    else:
        outcome = response["outcome"]
        print(f"status:   {outcome['status']} (attempts {outcome['attempts_used']})")
        if response["planner_output"]:
            print(f"edit:     {response['planner_output']['edit_summary']}")
        if response["strategy"]:
            print(f"strategy: {response['strategy']['solve_strategy']} "
                  f"({response['strategy']['rationale']})")
        print(f"objective: {response['previous_objective']} -> {response['objective']}")
        _print_diff(response["diff"])
        if outcome["failure"]:
            failure = outcome["failure"]
            print(f"failure:  [{failure['failure_stage']}/{failure['failure_kind']}] "
                  f"{failure['failure_message']}")
    return 0 if response["outcome"]["status"] == "succeeded" else 1


def cmd_replay(args) -> int:
    report = run_replay(args.scenario, args.catalog, variant=args.variant,
                        planner=args.planner, budget=args.budget)
    print(report.text_table())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json())
        (out / "rows.csv").write_text(report.to_csv())
        print(f"wrote {out / 'report.json'} and {out / 'rows.csv'}")
    if args.json:
        print(report.to_json())
    scored = report.aggregates["scored_rows"]
    final = report.aggregates["criteria_counts"]["final_success"]
    return 0 if scored == 0 or final == scored else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(store_dir=args.store, ui_dist=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_export_lp(args) -> int:
    scenario = load_scenario(args.scenario)
    sys.stdout.write(write_lp(instantiate(scenario.state), name=scenario.name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reopt",
        description="Interactive re-optimization of structured MIP scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a scenario baseline")
    p_solve.add_argument("scenario")
    p_solve.add_argument("--preset", default=None)
    p_solve.add_argument("--backend", default="builtin")
    p_solve.add_argument("--json", action="store_true")
    p_solve.set_defaults(fn=cmd_solve)

    p_prompt = sub.add_parser("prompt", help="run one natural-language change request")
    p_prompt.add_argument("target", help="scenario name/path or stored session id")
    p_prompt.add_argument("delta", help="the change request text")
    p_prompt.add_argument("--budget", type=int, default=2)
    p_prompt.add_argument("--planner", default="mock", choices=("mock", "llm"))
    p_prompt.add_argument("--strategy", default="auto", choices=STRATEGIES)
    p_prompt.add_argument("--store", default=None, help="session store directory")
    p_prompt.add_argument("--checks", default=None, help="JSON file of prompt checks")
    p_prompt.add_argument("--json", action="store_true")
    p_prompt.set_defaults(fn=cmd_prompt)

    p_replay = sub.add_parser("replay", help="replay a prompt catalog and report")
    p_replay.add_argument("scenario")
    p_replay.add_argument("catalog")
    p_replay.add_argument("--variant", default="patch",
                          choices=("patch", "patch-no-selector"))
    p_replay.add_argument("--planner", default="mock", choices=("mock", "llm"))
    p_replay.add_argument("--budget", type=int, default=2)
    p_replay.add_argument("--out", default=None, help="directory for report.json/rows.csv")
    p_replay.add_argument("--json", action="store_true")
    p_replay.set_defaults(fn=cmd_replay)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--store", default=None)
    p_serve.add_argument("--ui", default=None, help="built UI bundle directory")
    p_serve.set_defaults(fn=cmd_serve)

    p_export = sub.add_parser("export-lp", help="write the scenario as CPLEX LP text")
    p_export.add_argument("scenario")
    p_export.set_defaults(fn=cmd_export_lp)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ReoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
