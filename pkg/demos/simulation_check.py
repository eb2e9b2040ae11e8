"""Cross-check the analytic availability model against sampling.

Takes one placed request and estimates its availability by drawing a
million component-state worlds, then compares the estimate with the
closed-form number. The two should sit within a few standard errors of
each other; the analytic side is exact, the sampler is the skeptic.
"""

import numpy as np

from havnfp import configuration_availability, greedy, instance_from_doc, monte_carlo_availability

rng = np.random.default_rng(3)

# moderate availabilities so that failures actually show up in the sample
doc = {
    "clusters": [{"name": f"c{i}", "availability": rng.uniform(0.9, 0.99)} for i in range(2)],
    "servers": [
        {
            "name": f"s{i}",
            "cluster": f"c{i % 2}",
            "capacity": 30,
            "availability": rng.uniform(0.9, 0.99),
        }
        for i in range(4)
    ],
    "vnf_types": [{"name": "nat", "availability": 0.95}],
    "access_points": [{"name": "p0"}, {"name": "p1"}],
    "access_links": [
        {"cluster": f"c{i}", "access_point": f"p{j}", "availability": 0.98}
        for i in range(2)
        for j in range(2)
    ],
    "sync_links": [{"cluster_a": "c0", "cluster_b": "c1", "availability": 0.97}],
    "requests": [
        {"name": f"r{i}", "vnf": "nat", "access_points": ["p0", "p1"], "demand": 6}
        for i in range(4)
    ],
}

instance = instance_from_doc(doc)
placement = greedy(instance, "bestavail")

for request in instance.requests:
    fragments = placement.request_fragments(request.id)
    analytic = configuration_availability(instance, request, fragments)
    estimate, stderr = monte_carlo_availability(
        instance, request, fragments, samples=1_000_000, seed=request.id
    )
    sigmas = abs(analytic - estimate) / stderr if stderr > 0 else float("inf")
    print(
        f"{request.name}: analytic {analytic:.6f}  sampled {estimate:.6f}"
        f"  stderr {stderr:.2e}  ({sigmas:.2f} sigma)"
    )
