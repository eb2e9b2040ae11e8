"""Command line front end.

Subcommands mirror the library layers: ``gen`` writes a generated
instance, ``solve`` runs one algorithm on one instance, ``campaign``
runs an experiment grid to CSV, ``summarize`` averages a results CSV,
and ``serve`` starts the planning service.

Exit codes: 0 success, 2 infeasible instance, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .exact import ExactConfig, ExactScopeError, exact_solve
from .greedy import POLICIES, greedy
from .instgen import GeneratorConfig, generate
from .model import (
    InstanceError,
    canonicalize,
    instance_to_doc,
    load_instance,
    validate,
)
from .placement import InfeasibleError, export_placement
from .vns import VnsConfig, vns

OK, INFEASIBLE, INPUT_ERROR = 0, 2, 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="havnfp")
    sub = parser.add_subparsers(required=True)

    gen = sub.add_parser("gen", help="generate a random instance")
    gen.add_argument("--requests", type=int, required=True)
    gen.add_argument("--aps-per-request", type=int, default=2)
    gen.add_argument("--multiplier", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", default="-")
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="solve one instance")
    solve.add_argument("-i", "--instance", required=True)
    solve.add_argument("--algo", choices=("greedy", "vns", "exact"), default="vns")
    solve.add_argument("--policy", choices=POLICIES, default="bestfit")
    solve.add_argument("--split", choices=("on", "off", "fallback"), default="off")
    solve.add_argument("--time-limit-per-start", type=float, default=None)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--max-iters", type=int, default=None)
    solve.add_argument("--node-budget", type=int, default=None)
    solve.add_argument("--time-limit", type=float, default=None)
    solve.add_argument("--split-grid", type=float, default=0.5,
                       help="fraction grid step for exact splitting")
    solve.add_argument("--sort-demand-desc", action="store_true")
    solve.add_argument("--trace", default=None,
                       help="write one JSON line per accepted VNS move")
    solve.add_argument("-o", "--output", default=None,
                       help="write the placement export here")
    solve.set_defaults(func=_cmd_solve)

    campaign = sub.add_parser("campaign", help="run an experiment grid")
    campaign.add_argument("--spec", required=True, help="campaign spec JSON")
    campaign.add_argument("-o", "--output", required=True, help="results CSV")
    campaign.add_argument("--jobs", type=int, default=1)
    campaign.set_defaults(func=_cmd_campaign)

    summarize = sub.add_parser("summarize", help="average a results CSV per cell")
    summarize.add_argument("-i", "--input", required=True)
    summarize.add_argument("-o", "--output", default="-")
    summarize.set_defaults(func=_cmd_summarize)

    serve = sub.add_parser("serve", help="run the planning service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--state-dir", default=None)
    serve.set_defaults(func=_cmd_serve)

    return parser


def _cmd_gen(args) -> int:
    config = GeneratorConfig(
        requests=args.requests,
        aps_per_request=args.aps_per_request,
        multiplier=args.multiplier,
        seed=args.seed,
    )
    text = canonicalize(instance_to_doc(generate(config)))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return OK


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    errors = [v for v in validate(instance) if not v.startswith("warning:")]
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR

    def run(split: bool):
        if args.algo == "greedy":
            placement = greedy(instance, args.policy, split=split,
                               sort_demand_desc=args.sort_demand_desc)
            return placement, placement.evaluate(algorithm=f"greedy-{args.policy}")
        if args.algo == "vns":
            trace: list | None = [] if args.trace else None
            config = VnsConfig(
                split=split,
                time_limit_per_start=args.time_limit_per_start,
                max_iterations=args.max_iters,
                rng_seed=args.seed,
            )
            placement, report = vns(instance, config, trace=trace)
            if args.trace:
                with open(args.trace, "w") as fh:
                    for record in trace:
                        fh.write(json.dumps(record) + "\n")
            return placement, report
        config = ExactConfig(
            split_grid=args.split_grid if split else None,
            node_budget=args.node_budget or ExactConfig.node_budget,
            time_limit=args.time_limit,
        )
        result = exact_solve(instance, config)
        return result.placement, result.report

    try:
        try:
            placement, report = run(split=args.split == "on")
        except InfeasibleError:
            if args.split != "fallback":
                raise
            placement, report = run(split=True)
    except (InfeasibleError, ExactScopeError) as exc:
        print(json.dumps({"feasible": False, "error": str(exc)}, indent=2))
        return INFEASIBLE

    doc = {
        "feasible": True,
        "algorithm": report.algorithm,
        "objective": report.objective,
        "worstRequests": [instance.requests[r].name for r in report.worst_requests],
        "splits": report.splits,
        "runtimeS": report.runtime_s,
    }
    print(json.dumps(doc, indent=2))
    if args.output:
        Path(args.output).write_text(
            json.dumps(export_placement(placement), indent=2) + "\n"
        )
    return OK


def _cmd_campaign(args) -> int:
    spec_doc = json.loads(Path(args.spec).read_text())
    spec = harness.CampaignSpec.from_doc(spec_doc)
    rows = harness.run_campaign(spec, jobs=args.jobs)
    harness.write_rows(rows, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")
    return OK


def _cmd_summarize(args) -> int:
    summary = harness.summarize(harness.read_rows(args.input))
    if args.output == "-":
        import csv

        writer = csv.DictWriter(sys.stdout, fieldnames=harness.SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(summary)
    else:
        harness.write_summary(summary, args.output)
    return OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(state_dir=args.state_dir), host=args.host, port=args.port)
    return OK


if __name__ == "__main__":
    sys.exit(main())
