"""Greedy construction of placements.

Requests are visited one by one (optionally largest demand first) and each
is assigned to the server a policy picks. When splitting is allowed and no
server fits the whole remaining demand, the policy picks among servers with
any spare capacity and the request continues on the next server. After all
requests are placed, a protection pass adds slaves to masters wherever
capacity is left, sweeping repeatedly until a full pass adds none.

Policies:

* ``bestfit``: smallest residual minus demand, so full servers are
  preferred and large holes stay intact,
* ``firstfit``: lowest server id that qualifies,
* ``bestavail``: highest product of server and cluster availability.

Ties always break toward the lowest server id, which keeps every policy
deterministic.

``next_fit_split`` is the linear-time feasibility fallback: it packs
requests into servers in id order, splitting on overflow, and succeeds
whenever total demand fits total capacity.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .model import CAPACITY_EPS, ProblemInstance
from .placement import InfeasibleError, Placement

POLICIES = ("bestfit", "firstfit", "bestavail")


def select_server(
    placement: Placement,
    demand: float,
    candidates: Iterable[int],
    policy: str,
    split: bool,
) -> int | None:
    """Pick a server for a demand, or None when nothing qualifies.

    Servers whose residual capacity covers the demand qualify directly.
    With ``split`` set and no such server, any server with positive
    residual qualifies instead (the caller then assigns what fits).
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    pool = [s for s in candidates if placement.residual(s) + CAPACITY_EPS >= demand]
    if not pool and split:
        pool = [s for s in candidates if placement.residual(s) > CAPACITY_EPS]
    if not pool:
        return None
    inst = placement.instance
    if policy == "bestfit":
        return min(pool, key=lambda s: (placement.residual(s) - demand, s))
    if policy == "firstfit":
        return min(pool)
    return min(
        pool,
        key=lambda s: (
            -inst.servers[s].availability * inst.clusters[inst.servers[s].cluster].availability,
            s,
        ),
    )


def greedy(
    instance: ProblemInstance,
    policy: str,
    split: bool = False,
    sort_demand_desc: bool = False,
) -> Placement:
    """Build a full placement with one policy; raises InfeasibleError.

    With ``split`` disabled every request must fit some server whole. With
    it enabled a request may spread over several servers, never assigning
    more than a server's residual capacity in one piece.
    """
    placement = Placement(instance)
    order = sorted(
        (r.id for r in instance.requests),
        key=(lambda r: (-instance.requests[r].demand, r)) if sort_demand_desc else (lambda r: r),
    )
    all_servers = list(range(len(instance.servers)))
    for r in order:
        demand = instance.requests[r].demand
        remaining = demand
        while remaining > CAPACITY_EPS:
            server = select_server(placement, remaining, all_servers, policy, split)
            if server is None:
                raise InfeasibleError(
                    f"request {instance.requests[r].name}: no server can take "
                    f"{remaining:g} more units"
                )
            residual = placement.residual(server)
            amount = remaining if residual + CAPACITY_EPS >= remaining else residual
            placement.assign_fraction(r, server, amount / demand)
            remaining -= amount
    add_slaves(placement, policy)
    return placement


def add_slaves(placement: Placement, policy: str) -> int:
    """Protect masters with slaves wherever capacity allows.

    Masters are visited in (server, vnf) order; each pass may free no
    capacity but can consume it, so passes repeat until one adds nothing.
    Returns the number of slaves added.
    """
    inst = placement.instance
    all_servers = range(len(inst.servers))
    added_total = 0
    while True:
        added = False
        if not placement.masters:
            break
        max_residual = max(placement.residual(s) for s in all_servers)
        for key in sorted(placement.masters):
            master = placement.masters[key]
            if master.reserved > max_residual + CAPACITY_EPS:
                continue
            candidates = [
                s for s in all_servers if s != master.server and s not in master.slaves
            ]
            server = select_server(placement, master.reserved, candidates, policy, split=False)
            if server is not None:
                placement.add_slave(key, server)
                added = True
                added_total += 1
                max_residual = max(placement.residual(s) for s in all_servers)
        if not added:
            break
    return added_total


def next_fit_split(instance: ProblemInstance) -> Placement:
    """Linear-time split packing; feasible whenever demand fits capacity.

    Walks servers in id order keeping one open; a request that overflows
    the open server fills it, closes it and continues on the next. No
    slaves are added: the result is a feasibility witness, not a tuned
    placement.
    """
    total_demand = instance.total_demand()
    if total_demand > instance.total_capacity() + CAPACITY_EPS:
        raise InfeasibleError(
            f"total demand {total_demand:g} exceeds total capacity "
            f"{instance.total_capacity():g}"
        )
    placement = Placement(instance)
    open_server = 0
    n = len(instance.servers)
    for req in instance.requests:
        remaining = req.demand
        while remaining > CAPACITY_EPS:
            if open_server >= n:
                raise InfeasibleError(
                    f"request {req.name}: ran out of servers with {remaining:g} "
                    "units left"
                )
            residual = placement.residual(open_server)
            if residual <= CAPACITY_EPS:
                open_server += 1
                continue
            if residual + CAPACITY_EPS >= remaining:
                placement.assign_fraction(req.id, open_server, remaining / req.demand)
                remaining = 0.0
            else:
                placement.assign_fraction(req.id, open_server, residual / req.demand)
                remaining -= residual
                open_server += 1
    return placement
