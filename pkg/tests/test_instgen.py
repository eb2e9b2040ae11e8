import pytest

from havnfp.instgen import PALETTE, GeneratorConfig, generate, sweep
from havnfp.model import canonical_text


def cfg(**kw):
    base = dict(requests=40, aps_per_request=2, multiplier=1.5, seed=11)
    base.update(kw)
    return GeneratorConfig(**base)


def test_generate_is_deterministic():
    a = generate(cfg())
    b = generate(cfg())
    assert canonical_text(a) == canonical_text(b)


def test_seed_changes_the_instance():
    assert canonical_text(generate(cfg(seed=1))) != canonical_text(generate(cfg(seed=2)))


def test_access_point_subsets_nest_across_densities():
    per_density = {k: generate(cfg(aps_per_request=k)) for k in (1, 2, 3)}
    reqs = {k: inst.requests for k, inst in per_density.items()}
    for r1, r2, r3 in zip(reqs[1], reqs[2], reqs[3]):
        assert r1.demand == r2.demand == r3.demand
        assert r1.vnf == r2.vnf == r3.vnf
        assert set(r1.access_points) <= set(r2.access_points) <= set(r3.access_points)
        assert len(r3.access_points) == 3


def test_server_lists_nest_across_multipliers():
    small = generate(cfg(multiplier=1.0))
    big = generate(cfg(multiplier=2.5))
    assert len(big.servers) > len(small.servers)
    for a, b in zip(small.servers, big.servers):
        assert (a.name, a.cluster, a.capacity, a.availability) == (
            b.name,
            b.cluster,
            b.capacity,
            b.availability,
        )


def test_sweep_shares_requests_and_matches_generate():
    instances = sweep(cfg(), [2.0, 1.0, 1.0])
    assert [len(i.servers) for i in instances] == [
        len(instances[0].servers),
        len(instances[1].servers),
        len(instances[1].servers),
    ]
    assert canonical_text(instances[1]) == canonical_text(instances[2])
    assert canonical_text(instances[1]) == canonical_text(generate(cfg(multiplier=1.0)))
    assert canonical_text(instances[0]) == canonical_text(generate(cfg(multiplier=2.0)))
    first = instances[1]
    for inst in instances:
        assert [r.name for r in inst.requests] == [r.name for r in first.requests]
        assert [r.demand for r in inst.requests] == [r.demand for r in first.requests]


def test_round_robin_keeps_clusters_balanced():
    inst = generate(cfg(requests=120, multiplier=3.0))
    sizes: dict[int, int] = {}
    for server in inst.servers:
        sizes[server.cluster] = sizes.get(server.cluster, 0) + 1
    assert max(sizes.values()) - min(sizes.values()) <= 1
    for i, server in enumerate(inst.servers):
        assert inst.clusters[server.cluster].name == f"cluster-{i % 3:02d}"


def test_availabilities_come_from_the_palette():
    inst = generate(cfg())
    values = (
        [s.availability for s in inst.servers]
        + [c.availability for c in inst.clusters]
        + [v.availability for v in inst.vnf_types]
        + list(inst.access_links.values())
        + list(inst.sync_links.values())
    )
    assert values
    assert set(values) <= set(PALETTE)


def test_ranges_and_zero_padded_names():
    inst = generate(cfg(requests=60))
    assert all(1 <= r.demand <= 10 for r in inst.requests)
    assert all(75 <= s.capacity <= 125 for s in inst.servers)
    req_names = [r.name for r in inst.requests]
    server_names = [s.name for s in inst.servers]
    assert req_names == sorted(req_names)
    assert server_names == sorted(server_names)
    assert req_names[0] == "request-00000"
    assert server_names[0] == "server-0000"


def test_capacity_covers_the_demand_target_minimally():
    inst = generate(cfg(multiplier=2.0))
    total_demand = sum(r.demand for r in inst.requests)
    capacities = [s.capacity for s in inst.servers]
    assert sum(capacities) >= 2.0 * total_demand
    assert sum(capacities[:-1]) < 2.0 * total_demand


@pytest.mark.parametrize(
    "bad",
    [
        dict(requests=-1),
        dict(aps_per_request=0),
        dict(aps_per_request=4),
        dict(multiplier=-0.5),
        dict(cluster_count=0),
        dict(vnf_count=0),
        dict(demand_range=(0, 5)),
        dict(demand_range=(7, 3)),
        dict(capacity_range=(10, 5)),
        dict(availability_palette=(0.999, 1.5)),
    ],
)
def test_config_validation_rejects(bad):
    with pytest.raises(ValueError):
        generate(cfg(**bad))
