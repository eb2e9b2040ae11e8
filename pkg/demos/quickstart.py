"""
Placing two requests on a three-server infrastructure
=====================================================

Builds a small two-cluster instance by hand, solves it with a greedy
policy and with the local search, and prints where every replica went
and what availability each request ends up with.
"""

from havnfp import (
    GeneratorConfig,
    VnsConfig,
    greedy,
    instance_from_doc,
    vns,
)

doc = {
    "clusters": [
        {"name": "edge", "availability": 0.999},
        {"name": "core", "availability": 0.998},
    ],
    "servers": [
        {"name": "edge-a", "cluster": "edge", "capacity": 10, "availability": 0.99},
        {"name": "edge-b", "cluster": "edge", "capacity": 10, "availability": 0.97},
        {"name": "core-a", "cluster": "core", "capacity": 12, "availability": 0.98},
    ],
    "vnf_types": [{"name": "firewall", "availability": 0.995}],
    "access_points": [{"name": "pop-1"}, {"name": "pop-2"}],
    "access_links": [
        {"cluster": "edge", "access_point": "pop-1", "availability": 0.9999},
        {"cluster": "edge", "access_point": "pop-2", "availability": 0.9999},
        {"cluster": "core", "access_point": "pop-1", "availability": 0.9999},
        {"cluster": "core", "access_point": "pop-2", "availability": 0.9999},
    ],
    "sync_links": [
        {"cluster_a": "edge", "cluster_b": "core", "availability": 0.999},
    ],
    "requests": [
        {"name": "tenant-1", "vnf": "firewall", "access_points": ["pop-1", "pop-2"], "demand": 4},
        {"name": "tenant-2", "vnf": "firewall", "access_points": ["pop-1"], "demand": 5},
    ],
}

instance = instance_from_doc(doc)

# a single greedy pass: pick servers by the bestavail policy, then add
# protection replicas into whatever capacity is left
placement = greedy(instance, "bestavail")
report = placement.evaluate(algorithm="greedy-bestavail")
print("greedy minimum availability:", report.objective)

# the local search starts from all three greedy policies and keeps the
# best placement it can reach by swapping and moving instances
placement, report = vns(instance, VnsConfig())
print("vns minimum availability:   ", report.objective)

print()
for request in instance.requests:
    detail = placement.availability_detail(request.id)
    print(f"{detail['request']}: availability {detail['availability']:.6f}")
    for fragment in detail["fragments"]:
        slaves = [s for s in fragment["protection"] if s != fragment["master"]]
        print(
            f"  master {fragment['master']}"
            f" protected by {slaves or 'nothing'}"
            f" carries {fragment['fraction'] * 100:.0f}% of the demand"
        )

# instances of the same shape can also be drawn at any size
from havnfp import generate

big = generate(GeneratorConfig(requests=20, multiplier=2.0, seed=1))
print()
print(
    f"generated instance: {len(big.requests)} requests over "
    f"{len(big.servers)} servers in {len(big.clusters)} clusters"
)
