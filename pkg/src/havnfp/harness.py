"""Experiment campaigns over generated instances.

A campaign crosses request counts, access-point densities, capacity
multipliers and replications, runs each configured algorithm on every
instance, and emits one CSV row per (instance, algorithm). Instances are
derived from the campaign's base seed with a stable content hash, so a
campaign is reproducible run to run and row by row regardless of worker
count; runtime columns are the only nondeterministic ones and comparisons
should exclude them.

Every solve first tries whole-request assignment; when that is infeasible
it retries with splitting allowed and records the fallback in its own
column. Rows that stay infeasible keep their identity columns and flag
feasible=false with empty metrics.
"""

from __future__ import annotations

import csv
import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .exact import ExactConfig, ExactScopeError, exact_solve
from .greedy import greedy
from .instgen import GeneratorConfig, sweep
from .model import ProblemInstance
from .placement import InfeasibleError, SolveReport
from .vns import VnsConfig, vns

ALGORITHMS = ("greedy-bestfit", "greedy-firstfit", "greedy-bestavail", "vns", "exact")

CSV_COLUMNS = (
    "seed",
    "requests",
    "aps_per_request",
    "multiplier",
    "algorithm",
    "a_min",
    "worst_count",
    "splits",
    "runtime_s",
    "feasible",
    "split_fallback",
)

SUMMARY_COLUMNS = (
    "requests",
    "aps_per_request",
    "multiplier",
    "algorithm",
    "n",
    "n_feasible",
    "mean_a_min",
    "mean_worst_count",
    "mean_splits",
    "mean_runtime_s",
)


@dataclass
class CampaignSpec:
    request_counts: Sequence[int]
    ap_counts: Sequence[int] = (2,)
    multipliers: Sequence[float] = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0)
    replications: int = 30
    algorithms: Sequence[str] = ALGORITHMS[:4]
    base_seed: int = 0
    time_limit_per_start: float | None = None
    vns_max_iterations: int | None = None
    exact: ExactConfig = field(default_factory=ExactConfig)

    @staticmethod
    def from_doc(doc: dict) -> "CampaignSpec":
        known = {f for f in CampaignSpec.__dataclass_fields__ if f != "exact"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown campaign keys: {sorted(unknown)}")
        return CampaignSpec(**{k: v for k, v in doc.items()})


def derive_seed(base_seed: int, *key: Any) -> int:
    """Stable 63-bit seed from the base seed and a row key."""
    text = repr((base_seed,) + key).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "big") >> 1


def run_campaign(spec: CampaignSpec, jobs: int = 1) -> list[dict[str, Any]]:
    """All campaign rows, in deterministic order.

    With jobs > 1, replication groups run in a process pool; row order and
    seeds do not depend on the worker count.
    """
    for algo in spec.algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algo!r}")
    groups = [
        (requests, aps, rep)
        for requests in spec.request_counts
        for aps in spec.ap_counts
        for rep in range(spec.replications)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_group, [(spec, g) for g in groups]))
    else:
        chunks = [_run_group((spec, g)) for g in groups]
    return [row for chunk in chunks for row in chunk]


def _run_group(args: tuple[CampaignSpec, tuple[int, int, int]]) -> list[dict[str, Any]]:
    spec, (requests, aps, rep) = args
    seed = derive_seed(spec.base_seed, "instance", requests, aps, rep)
    instances = sweep(
        GeneratorConfig(requests=requests, aps_per_request=aps, seed=seed),
        list(spec.multipliers),
    )
    rows = []
    for multiplier, instance in zip(spec.multipliers, instances):
        for algorithm in spec.algorithms:
            row = _run_one(spec, instance, algorithm)
            row.update(
                seed=seed,
                requests=requests,
                aps_per_request=aps,
                multiplier=multiplier,
            )
            rows.append(row)
    return rows


def _run_one(spec: CampaignSpec, instance: ProblemInstance, algorithm: str) -> dict[str, Any]:
    t0 = time.perf_counter()
    fallback = False
    report: SolveReport | None = None
    try:
        try:
            report = _solve(spec, instance, algorithm, split=False)
        except InfeasibleError:
            fallback = True
            report = _solve(spec, instance, algorithm, split=True)
    except (InfeasibleError, ExactScopeError):
        report = None
    runtime = time.perf_counter() - t0
    if report is None:
        return {
            "algorithm": algorithm,
            "a_min": "",
            "worst_count": "",
            "splits": "",
            "runtime_s": f"{runtime:.6f}",
            "feasible": False,
            "split_fallback": fallback,
        }
    return {
        "algorithm": algorithm,
        "a_min": repr(report.objective),
        "worst_count": len(report.worst_requests),
        "splits": report.splits,
        "runtime_s": f"{runtime:.6f}",
        "feasible": True,
        "split_fallback": fallback,
    }


def _solve(
    spec: CampaignSpec, instance: ProblemInstance, algorithm: str, split: bool
) -> SolveReport:
    if algorithm.startswith("greedy-"):
        placement = greedy(instance, algorithm.removeprefix("greedy-"), split=split)
        return placement.evaluate(algorithm=algorithm)
    if algorithm == "vns":
        config = VnsConfig(
            split=split,
            time_limit_per_start=spec.time_limit_per_start,
            max_iterations=spec.vns_max_iterations,
        )
        _, report = vns(instance, config)
        return report
    if algorithm == "exact":
        config = spec.exact
        if split and config.split_grid is None:
            config = ExactConfig(**{**config.__dict__, "split_grid": 0.5})
        return exact_solve(instance, config).report
    raise ValueError(f"unknown algorithm {algorithm!r}")


def write_rows(rows: Iterable[dict[str, Any]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row[k]) for k in CSV_COLUMNS})


def read_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def summarize(rows: Iterable[dict[str, Any]]) -> list[dict[str, Any]]:
    """Group rows by (requests, aps, multiplier, algorithm) and average.

    Means cover feasible rows only; the n columns make the base visible.
    Accepts rows as produced by run_campaign or as read back from CSV.
    """
    groups: dict[tuple, list[dict[str, Any]]] = {}
    for row in rows:
        key = (
            int(row["requests"]),
            int(row["aps_per_request"]),
            float(row["multiplier"]),
            row["algorithm"],
        )
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups):
        requests, aps, multiplier, algorithm = key
        members = groups[key]
        feasible = [r for r in members if _truthy(r["feasible"])]
        out.append(
            {
                "requests": requests,
                "aps_per_request": aps,
                "multiplier": multiplier,
                "algorithm": algorithm,
                "n": len(members),
                "n_feasible": len(feasible),
                "mean_a_min": _mean(feasible, "a_min"),
                "mean_worst_count": _mean(feasible, "worst_count"),
                "mean_splits": _mean(feasible, "splits"),
                "mean_runtime_s": _mean(members, "runtime_s"),
            }
        )
    return out


def write_summary(rows: Iterable[dict[str, Any]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row[k]) for k in SUMMARY_COLUMNS})


def _mean(rows: list[dict[str, Any]], column: str) -> str:
    values = [float(r[column]) for r in rows if r[column] != ""]
    if not values:
        return ""
    return repr(sum(values) / len(values))


def _truthy(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("true", "1")


def _cell(value: Any) -> Any:
    if isinstance(value, bool):
        return "true" if value else "false"
    return value
