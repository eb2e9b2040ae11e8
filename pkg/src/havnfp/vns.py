"""Variable neighborhood search around greedy starting points.

Each of the three greedy policies provides a starting placement; around
each start the search sweeps four neighborhoods in a fixed order, always
anchored at the requests currently realizing the minimum availability:

* ``vnfswap``: swap a VNF instance serving or protecting a worst request
  with an instance on another server, or move it to a free slot,
* ``slaveswap``: remove one slave and protect a worst request's master
  with the freed capacity instead,
* ``requestswap``: exchange one fragment of a worst request with a
  fragment of another request,
* ``requestmove``: move one fragment of a worst request to another server.

The first candidate that improves the incumbent is accepted, the slave
addition pass reruns (a move often pays off only through the protection
it makes room for: that pass is part of candidate evaluation), and the
sweep restarts from the first neighborhood. A start ends at a local
optimum of all four neighborhoods, on the per-start time limit, or when
the accepted-move cap is reached. The best placement across starts wins;
an improvement means a strictly higher minimum availability, or an equal
one reached by fewer worst requests.

Operators move or swap whole fragments and never re-split them; fragments
of one request landing on one server merge. Candidate enumeration is
fully deterministic (ids ascending everywhere), so a fixed (instance,
config) pair always yields the same trace. The ``rng_seed`` field is
carried for reproducibility plumbing but the default sweeps draw nothing
from it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .greedy import add_slaves, greedy
from .model import AVAIL_EPS, ProblemInstance
from .placement import (
    InfeasibleError,
    OperationRejected,
    Placement,
    SolveReport,
)

NEIGHBORHOODS = ("vnfswap", "slaveswap", "requestswap", "requestmove")
#: Greedy policies used as starting points, in exploration order.
START_POLICIES = ("bestavail", "bestfit", "firstfit")


@dataclass
class VnsConfig:
    neighborhood_order: tuple[str, ...] = NEIGHBORHOODS
    #: Cap on accepted moves across the whole call; None means unbounded.
    max_iterations: int | None = None
    #: Wall-clock budget per greedy start, checked between candidate
    #: evaluations; None means run each start to its local optimum.
    time_limit_per_start: float | None = None
    rng_seed: int = 0
    #: Allow the greedy starts to split requests across servers.
    split: bool = False


@dataclass
class _Budget:
    deadline: float | None
    moves_left: float

    def expired(self) -> bool:
        if self.moves_left <= 0:
            return True
        return self.deadline is not None and time.perf_counter() >= self.deadline


def improves(candidate: SolveReport, incumbent: SolveReport) -> bool:
    """Higher minimum availability, or a tie carried by fewer worst requests."""
    if candidate.objective > incumbent.objective + AVAIL_EPS:
        return True
    return (
        candidate.objective >= incumbent.objective - AVAIL_EPS
        and len(candidate.worst_requests) < len(incumbent.worst_requests)
    )


def vns(
    instance: ProblemInstance,
    config: VnsConfig | None = None,
    trace: list | None = None,
    initial: Placement | None = None,
) -> tuple[Placement, SolveReport]:
    """Run the full search; raises InfeasibleError if no start is feasible.

    When ``trace`` is a list, one record per accepted move is appended
    (start policy, operator, objective delta, new objective, timestamp).
    ``initial`` injects an existing complete placement for this instance
    as an extra starting point, explored before the greedy ones.
    """
    config = config or VnsConfig()
    order = tuple(op.lower() for op in config.neighborhood_order)
    for op in order:
        if op not in _OPERATORS:
            raise ValueError(f"unknown neighborhood {op!r}")
    t0 = time.perf_counter()
    moves_left = float("inf") if config.max_iterations is None else config.max_iterations
    best: tuple[Placement, SolveReport] | None = None

    starts: list[tuple[str, str, Callable[[], Placement]]] = []
    if initial is not None:
        starts.append(("warm", "bestavail", initial.clone))
    for policy in START_POLICIES:
        starts.append(
            (policy, policy, lambda p=policy: greedy(instance, p, split=config.split))
        )

    for label, policy, make_start in starts:
        try:
            placement = make_start()
        except InfeasibleError:
            continue
        if label == "warm":
            add_slaves(placement, policy)
        report = placement.evaluate()
        budget = _Budget(
            deadline=None
            if config.time_limit_per_start is None
            else time.perf_counter() + config.time_limit_per_start,
            moves_left=moves_left,
        )
        while not budget.expired():
            found = None
            for op in order:
                found = _OPERATORS[op](placement, report, policy, budget)
                if found is not None or budget.expired():
                    break
            if found is None:
                break
            candidate, cand_report, op = found
            if trace is not None:
                trace.append(
                    {
                        "start": label,
                        "operator": op,
                        "delta": cand_report.objective - report.objective,
                        "objective": cand_report.objective,
                        "worst_count": len(cand_report.worst_requests),
                        "timestamp": time.time(),
                    }
                )
            placement, report = candidate, cand_report
            budget.moves_left -= 1
        moves_left = budget.moves_left
        if best is None or improves(report, best[1]):
            best = (placement, report)

    if best is None:
        raise InfeasibleError("every greedy starting point is infeasible")
    placement, report = best
    report.algorithm = "vns"
    report.runtime_s = time.perf_counter() - t0
    return placement, report


# ---------------------------------------------------------------------------
# neighborhood scans: first improving candidate or None

_Candidate = tuple[Placement, SolveReport, str]


def _try_candidate(
    placement: Placement,
    report: SolveReport,
    policy: str,
    mutate: Callable[[Placement], None],
    op: str,
) -> _Candidate | None:
    candidate = placement.clone()
    try:
        mutate(candidate)
    except OperationRejected:
        return None
    add_slaves(candidate, policy)
    cand_report = candidate.evaluate()
    if improves(cand_report, report):
        return candidate, cand_report, op
    return None


def _worst_master_keys(placement: Placement, report: SolveReport) -> list[tuple[int, int]]:
    keys = set()
    for r in report.worst_requests:
        vnf = placement.instance.requests[r].vnf
        for server in placement.assignments.get(r, {}):
            keys.add((server, vnf))
    return sorted(keys)


def _instances_on(placement: Placement, server: int) -> Iterator[tuple]:
    """All instance descriptors hosted on one server, in a stable order."""
    for (s, vnf) in sorted(placement.masters):
        if s == server:
            yield ("master", s, vnf)
    for (s, vnf) in sorted(placement.masters):
        if server in placement.masters[(s, vnf)].slaves:
            yield ("slave", s, vnf, server)


def _scan_vnfswap(
    placement: Placement, report: SolveReport, policy: str, budget: _Budget
) -> _Candidate | None:
    """Swap an instance tied to a worst request with one on another server."""
    sources: list[tuple] = []
    for key in _worst_master_keys(placement, report):
        sources.append(("master",) + key)
        for host in sorted(placement.masters[key].slaves):
            sources.append(("slave",) + key + (host,))
    n_servers = len(placement.instance.servers)
    for a in sources:
        host_a = a[1] if a[0] == "master" else a[3]
        for target in range(n_servers):
            if target == host_a:
                continue
            partners: list[tuple | None] = list(_instances_on(placement, target))
            partners.append(None)
            for b in partners:
                if budget.expired():
                    return None
                found = _try_candidate(
                    placement,
                    report,
                    policy,
                    lambda c, a=a, b=b, t=target: c.swap_instances(a, b, target=t),
                    "vnfswap",
                )
                if found:
                    return found
    return None


def _scan_slaveswap(
    placement: Placement, report: SolveReport, policy: str, budget: _Budget
) -> _Candidate | None:
    """Trade one existing slave for protection of a worst request's master."""
    worst_keys = _worst_master_keys(placement, report)
    if not worst_keys:
        return None
    for key in sorted(placement.masters):
        for host in sorted(placement.masters[key].slaves):
            for target_key in worst_keys:
                if target_key == key:
                    continue
                if budget.expired():
                    return None

                def mutate(c: Placement, key=key, host=host, target_key=target_key):
                    c.remove_slave(key, host)
                    c.add_slave(target_key, host)

                found = _try_candidate(placement, report, policy, mutate, "slaveswap")
                if found:
                    return found
    return None


def _scan_requestswap(
    placement: Placement, report: SolveReport, policy: str, budget: _Budget
) -> _Candidate | None:
    """Exchange a worst request's fragment with another request's fragment."""
    for rw in report.worst_requests:
        for sw in sorted(placement.assignments.get(rw, {})):
            xw = placement.assignments[rw][sw]
            for other in sorted(placement.assignments):
                if other == rw:
                    continue
                for so in sorted(placement.assignments[other]):
                    if so == sw:
                        continue
                    if budget.expired():
                        return None
                    xo = placement.assignments[other][so]

                    def mutate(c: Placement, rw=rw, sw=sw, xw=xw, other=other, so=so, xo=xo):
                        c.remove_fragment(rw, sw)
                        c.remove_fragment(other, so)
                        c.assign_fraction(rw, so, xw)
                        c.assign_fraction(other, sw, xo)

                    found = _try_candidate(placement, report, policy, mutate, "requestswap")
                    if found:
                        return found
    return None


def _scan_requestmove(
    placement: Placement, report: SolveReport, policy: str, budget: _Budget
) -> _Candidate | None:
    """Move a worst request's fragment to another server."""
    n_servers = len(placement.instance.servers)
    for rw in report.worst_requests:
        for sw in sorted(placement.assignments.get(rw, {})):
            xw = placement.assignments[rw][sw]
            for target in range(n_servers):
                if target == sw:
                    continue
                if budget.expired():
                    return None

                def mutate(c: Placement, rw=rw, sw=sw, xw=xw, target=target):
                    c.remove_fragment(rw, sw)
                    c.assign_fraction(rw, target, xw)

                found = _try_candidate(placement, report, policy, mutate, "requestmove")
                if found:
                    return found
    return None


_OPERATORS: dict[str, Callable] = {
    "vnfswap": _scan_vnfswap,
    "slaveswap": _scan_slaveswap,
    "requestswap": _scan_requestswap,
    "requestmove": _scan_requestmove,
}
