"""Solvers for high-availability VNF placement.

The problem: place master and slave VNF instances on a clustered
infrastructure and assign client requests to them so that the smallest
per-request availability is as large as possible. The package provides
the instance model, the availability calculus with a Monte Carlo oracle,
greedy and variable-neighborhood-search heuristics, an exact
branch-and-bound solver for small instances, a random instance
generator, an experiment harness, and an HTTP planning service.
"""

from .availability import (
    Fragment,
    access_availability,
    configuration_availability,
    fragment_availability,
    fragment_detail,
    monte_carlo_availability,
    server_set_availability,
)
from .exact import ExactConfig, ExactResult, ExactScopeError, exact_solve
from .greedy import POLICIES, add_slaves, greedy, next_fit_split, select_server
from .harness import CampaignSpec, run_campaign, summarize
from .instgen import GeneratorConfig, generate, sweep
from .model import (
    AVAIL_EPS,
    CAPACITY_EPS,
    InstanceError,
    ProblemInstance,
    canonicalize,
    instance_from_doc,
    instance_to_doc,
    load_instance,
    loads_instance,
    save_instance,
    validate,
)
from .placement import (
    InfeasibleError,
    OperationRejected,
    Placement,
    SolveReport,
    export_placement,
    import_placement,
    verify_placement,
)
from .vns import NEIGHBORHOODS, VnsConfig, improves, vns

__version__ = "0.1.0"

__all__ = [
    "AVAIL_EPS",
    "CAPACITY_EPS",
    "CampaignSpec",
    "ExactConfig",
    "ExactResult",
    "ExactScopeError",
    "Fragment",
    "GeneratorConfig",
    "InfeasibleError",
    "InstanceError",
    "NEIGHBORHOODS",
    "OperationRejected",
    "POLICIES",
    "Placement",
    "ProblemInstance",
    "SolveReport",
    "VnsConfig",
    "access_availability",
    "add_slaves",
    "canonicalize",
    "configuration_availability",
    "exact_solve",
    "export_placement",
    "fragment_availability",
    "fragment_detail",
    "generate",
    "greedy",
    "import_placement",
    "improves",
    "instance_from_doc",
    "instance_to_doc",
    "load_instance",
    "loads_instance",
    "monte_carlo_availability",
    "next_fit_split",
    "run_campaign",
    "save_instance",
    "select_server",
    "server_set_availability",
    "summarize",
    "sweep",
    "validate",
    "verify_placement",
    "vns",
]
