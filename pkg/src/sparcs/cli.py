"""Command-line front end.

Verbs: validate a scenario directory, run the feeding demo, run the three
experiment families, diff two workflow documents, and serve the HTTP API.
Exit codes: 0 success, 1 validation failure, 2 experiment assertion
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import canon
from .errors import SparcsError
from .scenario import load_scenario, list_scenarios
from .workflow import decode_workflow, diff_workflows, validate_hierarchy


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario_dir)
    except SparcsError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    checked = []
    for name, wf in (("human", scenario.workflow_human), ("robot", scenario.workflow_robot)):
        if wf is None:
            continue
        diags = validate_hierarchy(wf)
        checked.append(name)
        for diag in diags:
            print(f"  {name}: {diag.rule} at {diag.node_id}: {diag.message}", file=sys.stderr)
        if diags:
            return 1
    print(f"ok: {scenario.scenario_id} (workflows: {', '.join(checked) or 'none'})")
    return 0


def _cmd_demo(args) -> int:
    from .demo import run_feeding_demo

    try:
        scenario = load_scenario(args.scenario_dir)
        result = run_feeding_demo(scenario, args.seed)
    except SparcsError as exc:
        print(f"demo error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(result.text)
    if args.out:
        Path(args.out).write_text(result.text, encoding="utf-8")
    if not result.completed:
        print(f"demo failed at node {result.failed_node}", file=sys.stderr)
        return 1
    return 0


def _cmd_exp(args) -> int:
    from . import experiments

    config = canon.read_file(args.config) if args.config else None
    out_dir = args.out
    if args.family == "transfer":
        result = experiments.run_bite_transfer_experiment(config, out_dir)
        sys.stdout.write(result["summary"])
        return 0 if all(result["checks"].values()) else 2
    if args.family == "sequencing":
        result = experiments.run_bite_sequencing_experiment(config, out_dir)
        sys.stdout.write(result["summary"])
        means = result["means"]
        ok = means["HO"] >= means["HS"] >= means["Random"]
        return 0 if ok else 2
    result = experiments.run_robot_model_comparison(config, out_dir)
    sys.stdout.write(result["summary"])
    ok = all(row["success_rate"] == 1.0 for row in result["table"])
    return 0 if ok else 2


def _cmd_diff(args) -> int:
    try:
        a = decode_workflow(Path(args.workflow_a).read_text(encoding="utf-8"))
        b = decode_workflow(Path(args.workflow_b).read_text(encoding="utf-8"))
    except SparcsError as exc:
        print(f"diff error: {exc}", file=sys.stderr)
        return 1
    edits = diff_workflows(a, b)
    if not edits:
        print("identical (ignoring ids)")
        return 0
    for edit in edits:
        print(f"{edit.kind:<8} {'/'.join(edit.path)}")
    return 0


def _cmd_list(_args) -> int:
    for sid in list_scenarios():
        print(sid)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, seed_store
    from .store import DocumentStore

    store_dir = args.store or os.environ.get("SPARCS_STORE_DIR", "./sparcs_store")
    app = create_app(store_dir, ui_dir=args.ui_dir)
    if args.seed_data:
        loaded = seed_store(DocumentStore(store_dir))
        print(f"seeded {len(loaded)} bundled scenarios into {store_dir}")
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparcs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario directory")
    p.add_argument("scenario_dir")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("demo", help="run the feeding demo")
    p.add_argument("scenario_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the trace to this file")
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("exp", help="run an experiment family")
    p.add_argument("family", choices=["transfer", "sequencing", "robots"])
    p.add_argument("--config", help="JSON config overriding the defaults")
    p.add_argument("--out", help="directory for CSV/summary reports")
    p.set_defaults(func=_cmd_exp)

    p = sub.add_parser("diff", help="diff two workflow documents")
    p.add_argument("workflow_a")
    p.add_argument("workflow_b")
    p.set_defaults(func=_cmd_diff)

    p = sub.add_parser("list", help="list bundled scenarios")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("serve", help="run the HTTP document service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", help="store directory (or SPARCS_STORE_DIR)")
    p.add_argument("--ui-dir", help="serve a built web client from /ui")
    p.add_argument("--seed-data", action="store_true", help="import bundled scenarios")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
