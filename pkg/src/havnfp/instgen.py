"""Random instance generation with reproducible streams.

The generator mirrors the experimental setup the solvers are tuned
against: integer demands uniform on [1, 10], integer capacities uniform
on [75, 125], five VNF types, three clusters, three access points, and
every availability drawn from a small palette of carrier-grade values.
Servers are appended until total capacity reaches ``multiplier`` times
total demand and are spread round-robin over clusters, so cluster sizes
never differ by more than one. Access and synchronization link graphs
are complete.

Each entity family draws from its own child generator (numpy
SeedSequence spawn), in a documented order:

* requests: per request demand, then VNF type, then an access point
  permutation truncated to the requested count, so the chosen subsets
  are nested across access-point densities at equal seeds,
* servers: per server capacity then availability, consumed one server
  at a time, so the server lists are nested across multipliers,
* vnf types / clusters / access links / sync links: palette picks in
  name order.

``sweep`` exploits both nestings: one request set meets a strictly
growing server pool, which is what a capacity sweep is meant to isolate.
Entity names carry zero-padded indices so canonical name order equals
creation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import ProblemInstance, instance_from_doc

PALETTE = (0.9995, 0.9999, 0.99995, 0.99999)


@dataclass(frozen=True)
class GeneratorConfig:
    requests: int
    aps_per_request: int = 2
    multiplier: float = 1.0
    seed: int = 0
    vnf_count: int = 5
    cluster_count: int = 3
    access_point_count: int = 3
    demand_range: tuple[int, int] = (1, 10)
    capacity_range: tuple[int, int] = (75, 125)
    availability_palette: tuple[float, ...] = PALETTE


def generate(config: GeneratorConfig) -> ProblemInstance:
    """One instance; equal configs yield byte-identical instances."""
    return sweep(config, [config.multiplier])[0]


def sweep(config: GeneratorConfig, multipliers: Sequence[float]) -> list[ProblemInstance]:
    """One instance per multiplier, sharing requests and server prefixes.

    Multipliers are processed in ascending order internally; the returned
    list matches the order given. Asking for the same multiplier twice
    yields equal instances.
    """
    _check_config(config)
    streams = _streams(config.seed)
    palette = np.array(config.availability_palette)

    def pick(rng: np.random.Generator) -> float:
        return float(palette[rng.integers(0, len(palette))])

    vnf_rng = streams["vnfs"]
    vnfs = [
        {"name": f"vnf-{i:02d}", "availability": pick(vnf_rng)}
        for i in range(config.vnf_count)
    ]
    cluster_rng = streams["clusters"]
    clusters = [
        {"name": f"cluster-{i:02d}", "availability": pick(cluster_rng)}
        for i in range(config.cluster_count)
    ]
    aps = [{"name": f"ap-{i:02d}"} for i in range(config.access_point_count)]
    access_rng = streams["access_links"]
    access_links = [
        {
            "cluster": c["name"],
            "access_point": p["name"],
            "availability": pick(access_rng),
        }
        for c in clusters
        for p in aps
    ]
    sync_rng = streams["sync_links"]
    sync_links = [
        {
            "cluster_a": clusters[i]["name"],
            "cluster_b": clusters[j]["name"],
            "availability": pick(sync_rng),
        }
        for i in range(config.cluster_count)
        for j in range(i + 1, config.cluster_count)
    ]

    request_rng = streams["requests"]
    lo, hi = config.demand_range
    requests = []
    for i in range(config.requests):
        demand = int(request_rng.integers(lo, hi + 1))
        vnf = int(request_rng.integers(0, config.vnf_count))
        perm = request_rng.permutation(config.access_point_count)
        chosen = sorted(int(p) for p in perm[: config.aps_per_request])
        requests.append(
            {
                "name": f"request-{i:05d}",
                "vnf": vnfs[vnf]["name"],
                "access_points": [aps[p]["name"] for p in chosen],
                "demand": demand,
            }
        )
    total_demand = sum(r["demand"] for r in requests)

    server_rng = streams["servers"]
    clo, chi = config.capacity_range
    servers: list[dict] = []
    total_capacity = 0.0
    out: dict[float, ProblemInstance] = {}
    for m in sorted(set(multipliers)):
        target = m * total_demand
        while total_capacity < target:
            i = len(servers)
            capacity = int(server_rng.integers(clo, chi + 1))
            servers.append(
                {
                    "name": f"server-{i:04d}",
                    "cluster": clusters[i % config.cluster_count]["name"],
                    "capacity": capacity,
                    "availability": pick(server_rng),
                }
            )
            total_capacity += capacity
        out[m] = instance_from_doc(
            {
                "clusters": clusters,
                "servers": list(servers),
                "vnf_types": vnfs,
                "access_points": aps,
                "access_links": access_links,
                "sync_links": sync_links,
                "requests": requests,
            }
        )
    return [out[m] for m in multipliers]


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(6)
    names = ("vnfs", "clusters", "access_links", "sync_links", "requests", "servers")
    return {name: np.random.default_rng(seq) for name, seq in zip(names, children)}


def _check_config(config: GeneratorConfig) -> None:
    if config.requests < 0:
        raise ValueError("requests must be non-negative")
    if not 1 <= config.aps_per_request <= config.access_point_count:
        raise ValueError(
            "aps_per_request must be between 1 and the number of access points"
        )
    if config.multiplier < 0:
        raise ValueError("multiplier must be non-negative")
    if config.cluster_count < 1 or config.vnf_count < 1:
        raise ValueError("need at least one cluster and one VNF type")
    lo, hi = config.demand_range
    clo, chi = config.capacity_range
    if not (0 < lo <= hi and 0 < clo <= chi):
        raise ValueError("demand and capacity ranges must be positive and ordered")
    if not all(0.0 < a <= 1.0 for a in config.availability_palette):
        raise ValueError("palette values must be probabilities in (0, 1]")
