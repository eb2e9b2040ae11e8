"""Availability calculus for placed requests.

A request is served through one or more fragments. Each fragment has a
master server and a protection set: the master's server plus the servers
hosting slave replicas of that master. The fragment is up when at least
one cluster containing protection servers can serve it, which needs

* at least one access link between the client's access points and that
  cluster to be up,
* the cluster itself to be up,
* for clusters other than the master's, the synchronization link to the
  master's cluster to be up (state updates flow over it),
* at least one protection server in the cluster to be up together with
  the VNF software instance it hosts.

All component failures are independent, so each clause is a product of
probabilities and alternatives compose as 1 - prod(1 - p_i). A request
with several fragments is up when all fragments are up, and fragment
terms multiply; fractions play no role in availability. The Monte Carlo
estimator in this module samples exactly that event structure, drawing
component states fresh per fragment, which makes it a statistical oracle
for the closed-form path rather than a relaxation of it.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .model import ProblemInstance, Request

#: One fragment of a placed request: (master server id, protection server ids).
#: The protection set always contains the master's server.
Fragment = tuple[int, frozenset[int]]

_MC_CHUNK = 1 << 20


def access_availability(
    instance: ProblemInstance, cluster: int, access_points: Iterable[int]
) -> float:
    """Probability that at least one access link into the cluster is up."""
    miss = 1.0
    for p in access_points:
        miss *= 1.0 - instance.access_link(cluster, p)
    return 1.0 - miss


def server_set_availability(
    instance: ProblemInstance, vnf: int, servers: Iterable[int]
) -> float:
    """Probability that at least one server in the set runs the VNF.

    A server counts only if both the machine and the software instance it
    hosts are up. An empty set yields 0.
    """
    a_vnf = instance.vnf_types[vnf].availability
    miss = 1.0
    for s in servers:
        miss *= 1.0 - a_vnf * instance.servers[s].availability
    return 1.0 - miss


def fragment_availability(
    instance: ProblemInstance, request: Request, master: int, protection: Iterable[int]
) -> float:
    """Availability of a single fragment of a request.

    `protection` holds the servers of the master and of every slave
    protecting it; it must contain `master`. Clusters without protection
    servers contribute a factor of exactly 1.
    """
    groups = _protection_by_cluster(instance, master, protection)
    master_cluster = instance.servers[master].cluster
    miss = 1.0
    for cluster, servers in groups.items():
        term = (
            access_availability(instance, cluster, request.access_points)
            * instance.clusters[cluster].availability
            * server_set_availability(instance, request.vnf, servers)
        )
        if cluster != master_cluster:
            term *= instance.sync_link(master_cluster, cluster)
        miss *= 1.0 - term
    return 1.0 - miss


def configuration_availability(
    instance: ProblemInstance, request: Request, fragments: Sequence[Fragment]
) -> float:
    """Availability of a full configuration: all fragments must be up."""
    a = 1.0
    for master, protection in fragments:
        a *= fragment_availability(instance, request, master, protection)
    return a


def fragment_detail(
    instance: ProblemInstance, request: Request, master: int, protection: Iterable[int]
) -> dict:
    """Per-cluster breakdown of one fragment's availability, for display.

    Returns the same value as fragment_availability plus every intermediate
    term (access, cluster, sync, server set) per involved cluster, with
    component names rather than ids.
    """
    groups = _protection_by_cluster(instance, master, protection)
    master_cluster = instance.servers[master].cluster
    clusters = []
    miss = 1.0
    for cluster, servers in groups.items():
        access = access_availability(instance, cluster, request.access_points)
        cluster_up = instance.clusters[cluster].availability
        server_set = server_set_availability(instance, request.vnf, servers)
        sync = (
            1.0 if cluster == master_cluster else instance.sync_link(master_cluster, cluster)
        )
        term = access * cluster_up * server_set
        if cluster != master_cluster:
            term *= sync
        miss *= 1.0 - term
        clusters.append(
            {
                "cluster": instance.clusters[cluster].name,
                "isMasterCluster": cluster == master_cluster,
                "servers": sorted(instance.servers[s].name for s in servers),
                "access": access,
                "clusterUp": cluster_up,
                "sync": sync,
                "serverSet": server_set,
                "term": term,
            }
        )
    return {"availability": 1.0 - miss, "clusters": clusters}


def monte_carlo_availability(
    instance: ProblemInstance,
    request: Request,
    fragments: Sequence[Fragment],
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Estimate configuration availability by sampling component states.

    Per sampled world and per fragment, every involved access link, cluster,
    synchronization link, server and software instance is drawn up or down
    independently with its availability; the fragment is up when some
    cluster passes the full chain and the request is up when every fragment
    is. Returns (estimate, binomial standard error). Results depend only on
    (seed, samples); sampling is chunked at a fixed size so the draw order
    never varies with memory pressure.

    Component states are drawn fresh for each fragment, mirroring the
    independence assumed by the closed-form product over fragments.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    plans = [
        _fragment_plan(instance, request, master, protection)
        for master, protection in fragments
    ]
    rng = np.random.default_rng(seed)
    up = 0
    done = 0
    while done < samples:
        n = min(_MC_CHUNK, samples - done)
        ok = np.ones(n, dtype=bool)
        for plan in plans:
            ok &= _sample_fragment(rng, plan, n)
        up += int(ok.sum())
        done += n
    p = up / samples
    stderr = math.sqrt(p * (1.0 - p) / samples)
    return p, stderr


def _protection_by_cluster(
    instance: ProblemInstance, master: int, protection: Iterable[int]
) -> dict[int, list[int]]:
    servers = sorted(set(protection))
    if master not in servers:
        raise ValueError(f"protection set must contain the master server {master}")
    groups: dict[int, list[int]] = {}
    for s in servers:
        cluster = instance.servers[s].cluster
        if cluster < 0:
            raise ValueError(f"server {s} has no resolved cluster")
        groups.setdefault(cluster, []).append(s)
    return groups


def _fragment_plan(
    instance: ProblemInstance, request: Request, master: int, protection: Iterable[int]
):
    """Precompute the probability tables one fragment needs per sample chunk."""
    if request.vnf < 0:
        raise ValueError(f"request {request.name} has no resolved VNF type")
    a_vnf = instance.vnf_types[request.vnf].availability
    master_cluster = instance.servers[master].cluster
    clusters = []
    for cluster, servers in _protection_by_cluster(instance, master, protection).items():
        access = [instance.access_link(cluster, p) for p in request.access_points]
        clusters.append(
            {
                "cluster_up": instance.clusters[cluster].availability,
                "sync_up": 1.0
                if cluster == master_cluster
                else instance.sync_link(master_cluster, cluster),
                "access": np.array(access),
                "servers": np.array([instance.servers[s].availability for s in servers]),
                "software": a_vnf,
            }
        )
    return clusters


def _sample_fragment(rng: np.random.Generator, plan, n: int) -> np.ndarray:
    ok = np.zeros(n, dtype=bool)
    for c in plan:
        k = len(c["access"])
        access_up = (rng.random((n, k)) < c["access"]).any(axis=1) if k else np.zeros(n, dtype=bool)
        through = access_up & (rng.random(n) < c["cluster_up"])
        if c["sync_up"] < 1.0:
            through &= rng.random(n) < c["sync_up"]
        m = len(c["servers"])
        servers_up = (rng.random((n, m)) < c["servers"]) & (
            rng.random((n, m)) < c["software"]
        )
        through &= servers_up.any(axis=1)
        ok |= through
    return ok
