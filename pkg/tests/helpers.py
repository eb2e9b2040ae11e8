"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from havnfp.model import ProblemInstance, instance_from_doc


def make_doc(
    clusters,
    servers,
    requests,
    vnf_types=(("f0", 0.999),),
    access_points=("p0",),
    access_links=None,
    sync_links=None,
) -> dict:
    """Compact document builder.

    clusters: [(name, availability)]
    servers: [(name, cluster, capacity, availability)]
    requests: [(name, vnf, [access points], demand)]
    access_links / sync_links default to complete graphs at 0.9999 / 0.999.
    """
    cluster_names = [c[0] for c in clusters]
    if access_links is None:
        access_links = [(c, p, 0.9999) for c in cluster_names for p in access_points]
    if sync_links is None:
        sync_links = [
            (cluster_names[i], cluster_names[j], 0.999)
            for i in range(len(cluster_names))
            for j in range(i + 1, len(cluster_names))
        ]
    return {
        "clusters": [{"name": n, "availability": a} for n, a in clusters],
        "servers": [
            {"name": n, "cluster": c, "capacity": q, "availability": a}
            for n, c, q, a in servers
        ],
        "vnf_types": [{"name": n, "availability": a} for n, a in vnf_types],
        "access_points": [{"name": p} for p in access_points],
        "access_links": [
            {"cluster": c, "access_point": p, "availability": a}
            for c, p, a in access_links
        ],
        "sync_links": [
            {"cluster_a": x, "cluster_b": y, "availability": a} for x, y, a in sync_links
        ],
        "requests": [
            {"name": n, "vnf": v, "access_points": list(ps), "demand": d}
            for n, v, ps, d in requests
        ],
    }


def make_instance(*args, **kwargs) -> ProblemInstance:
    return instance_from_doc(make_doc(*args, **kwargs))


def two_cluster_instance() -> ProblemInstance:
    """Two clusters, three servers, two requests; room for protection."""
    return make_instance(
        clusters=[("c0", 0.999), ("c1", 0.998)],
        servers=[
            ("s0", "c0", 10, 0.99),
            ("s1", "c0", 10, 0.97),
            ("s2", "c1", 12, 0.98),
        ],
        requests=[
            ("r0", "f0", ["p0", "p1"], 4),
            ("r1", "f0", ["p0"], 5),
        ],
        vnf_types=[("f0", 0.995)],
        access_points=("p0", "p1"),
    )


def random_tiny_doc(rng: np.random.Generator, max_servers=3, max_requests=5) -> dict:
    """Small random instance for exactness tests; capacities keep it tight
    enough that config enumeration stays interesting."""
    n_clusters = int(rng.integers(1, 3))
    n_servers = int(rng.integers(2, max_servers + 1))
    n_vnfs = int(rng.integers(1, 3))
    n_aps = int(rng.integers(1, 3))
    n_requests = int(rng.integers(1, max_requests + 1))

    def avail():
        return float(rng.uniform(0.85, 0.999))

    clusters = [(f"c{i}", avail()) for i in range(n_clusters)]
    servers = [
        (f"s{i}", f"c{i % n_clusters}", int(rng.integers(6, 14)), avail())
        for i in range(n_servers)
    ]
    vnfs = [(f"f{i}", avail()) for i in range(n_vnfs)]
    aps = tuple(f"p{i}" for i in range(n_aps))
    access_links = [(c, p, avail()) for c, _ in clusters for p in aps]
    sync_links = [
        (f"c{i}", f"c{j}", avail())
        for i in range(n_clusters)
        for j in range(i + 1, n_clusters)
    ]
    requests = []
    for i in range(n_requests):
        k = int(rng.integers(1, n_aps + 1))
        points = sorted(f"p{j}" for j in rng.permutation(n_aps)[:k])
        requests.append(
            (f"r{i}", f"f{int(rng.integers(0, n_vnfs))}", points, int(rng.integers(1, 5)))
        )
    return make_doc(
        clusters=clusters,
        servers=servers,
        requests=requests,
        vnf_types=vnfs,
        access_points=aps,
        access_links=access_links,
        sync_links=sync_links,
    )


def random_oracle_doc(rng: np.random.Generator) -> dict:
    """Mid-availability random instance whose placements a 1e6-sample
    Monte Carlo run can actually resolve (failures are frequent enough)."""
    n_clusters = int(rng.integers(2, 4))
    n_servers = int(rng.integers(3, 7))
    n_aps = int(rng.integers(1, 4))
    n_requests = int(rng.integers(3, 8))

    def avail(lo=0.9, hi=0.99):
        return float(rng.uniform(lo, hi))

    clusters = [(f"c{i}", avail()) for i in range(n_clusters)]
    servers = [
        (f"s{i}", f"c{i % n_clusters}", int(rng.integers(20, 50)), avail())
        for i in range(n_servers)
    ]
    vnfs = [(f"f{i}", avail()) for i in range(2)]
    aps = tuple(f"p{i}" for i in range(n_aps))
    access_links = [(c, p, avail(0.9, 0.999)) for c, _ in clusters for p in aps]
    sync_links = [
        (f"c{i}", f"c{j}", avail(0.9, 0.999))
        for i in range(n_clusters)
        for j in range(i + 1, n_clusters)
    ]
    requests = []
    for i in range(n_requests):
        k = int(rng.integers(1, n_aps + 1))
        points = sorted(f"p{j}" for j in rng.permutation(n_aps)[:k])
        requests.append(
            (f"r{i}", f"f{int(rng.integers(0, 2))}", points, int(rng.integers(2, 9)))
        )
    return make_doc(
        clusters=clusters,
        servers=servers,
        requests=requests,
        vnf_types=vnfs,
        access_points=aps,
        access_links=access_links,
        sync_links=sync_links,
    )
