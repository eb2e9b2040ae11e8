"""Independent oracles the solver modules are tested against.

Nothing here imports from the solver implementations being checked: the
fragment oracle enumerates component world-states directly, and the
placement oracle enumerates raw (master map, slave sets) combinations
with nothing shared with the branch-and-bound code path.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from havnfp.availability import fragment_availability
from havnfp.model import CAPACITY_EPS, ProblemInstance, Request


def enumerate_fragment_availability(
    instance: ProblemInstance, request: Request, master: int, protection: Iterable[int]
) -> float:
    """Exact fragment availability by summing over all component states.

    Builds the full joint distribution of every involved component (access
    links, clusters, sync links, servers, software instances) and adds up
    the probability of the worlds where the fragment is served. Exponential
    in the component count, so only for tiny fixtures.
    """
    protection = sorted(set(protection))
    master_cluster = instance.servers[master].cluster
    clusters = sorted({instance.servers[s].cluster for s in protection})

    components: list[float] = []
    access_idx: dict[tuple[int, int], int] = {}
    cluster_idx: dict[int, int] = {}
    sync_idx: dict[int, int] = {}
    server_idx: dict[int, int] = {}
    soft_idx: dict[int, int] = {}

    def add(p: float) -> int:
        components.append(p)
        return len(components) - 1

    for c in clusters:
        cluster_idx[c] = add(instance.clusters[c].availability)
        for p in request.access_points:
            access_idx[(c, p)] = add(instance.access_link(c, p))
        if c != master_cluster:
            sync_idx[c] = add(instance.sync_link(master_cluster, c))
    a_vnf = instance.vnf_types[request.vnf].availability
    for s in protection:
        server_idx[s] = add(instance.servers[s].availability)
        soft_idx[s] = add(a_vnf)

    total = 0.0
    for world in itertools.product((True, False), repeat=len(components)):
        prob = 1.0
        for up, p in zip(world, components):
            prob *= p if up else 1.0 - p
        served = False
        for c in clusters:
            if not world[cluster_idx[c]]:
                continue
            if c != master_cluster and not world[sync_idx[c]]:
                continue
            if not any(world[access_idx[(c, p)]] for p in request.access_points):
                continue
            if any(
                world[server_idx[s]] and world[soft_idx[s]]
                for s in protection
                if instance.servers[s].cluster == c
            ):
                served = True
                break
        if served:
            total += prob
    return total


def brute_force_best(instance: ProblemInstance) -> float | None:
    """Best reachable minimum availability, by raw unsplit enumeration.

    Every request picks one master server; every resulting master instance
    independently picks a slave set on other servers, each slave reserving
    the instance's full demand. Returns None when nothing fits.
    """
    servers = instance.servers
    requests = instance.requests
    if not requests:
        return 1.0

    frag_cache: dict[tuple[int, int, frozenset[int]], float] = {}

    def frag(r: Request, master: int, protection: frozenset[int]) -> float:
        key = (r.id, master, protection)
        if key not in frag_cache:
            frag_cache[key] = fragment_availability(instance, r, master, protection)
        return frag_cache[key]

    best: float | None = None
    for master_map in itertools.product(range(len(servers)), repeat=len(requests)):
        load = [0.0] * len(servers)
        groups: dict[tuple[int, int], float] = {}
        ok = True
        for r, m in zip(requests, master_map):
            load[m] += r.demand
            key = (m, r.vnf)
            groups[key] = groups.get(key, 0.0) + r.demand
            if load[m] > servers[m].capacity + CAPACITY_EPS:
                ok = False
                break
        if not ok:
            continue

        instances = sorted(groups)
        slave_options = []
        for (m, _vnf) in instances:
            others = [s.id for s in servers if s.id != m]
            subsets = []
            for k in range(len(others) + 1):
                subsets.extend(frozenset(c) for c in itertools.combinations(others, k))
            slave_options.append(subsets)

        def walk(i: int, load_now: list[float], chosen: list[frozenset[int]]):
            nonlocal best
            if i == len(instances):
                worst = 1.0
                protection_of = dict(zip(instances, chosen))
                for r, m in zip(requests, master_map):
                    prot = frozenset({m}) | protection_of[(m, r.vnf)]
                    worst = min(worst, frag(r, m, prot))
                if best is None or worst > best:
                    best = worst
                return
            key = instances[i]
            reserved = groups[key]
            for subset in slave_options[i]:
                nxt = list(load_now)
                fits = True
                for s in subset:
                    nxt[s] += reserved
                    if nxt[s] > servers[s].capacity + CAPACITY_EPS:
                        fits = False
                        break
                if fits:
                    walk(i + 1, nxt, chosen + [subset])

        walk(0, load, [])
    return best
