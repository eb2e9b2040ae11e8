"""Exact solver for small instances by configuration enumeration.

Every request is assigned one configuration: a set of fragments, each a
master server with a protection set, fractions summing to one. The search
walks requests in a fixed order, branch-and-bound style:

* per-request configurations are precomputed with memoized availabilities
  and visited best-first, so a whole tail of a config list can be cut as
  soon as its availability cannot beat the incumbent,
* the running minimum availability only drops as requests are added, so a
  partial minimum at or below the incumbent prunes the subtree,
* capacity is checked incrementally; master reservations grow with the
  demand routed to them and every protection server reserves as much as
  the master it protects.

Requests sharing a master server must declare the same protection set.
That loses nothing: replacing each declared set by their union keeps the
capacity charge (protection is charged on the union anyway) and can only
raise availability, so some optimum always has agreeing sets. It also
guarantees the value found by the search equals the value of the
materialized placement, float for float.

No MIP solver is involved; the point of this module is a trustworthy
optimum for cross-checking the heuristics on tiny instances.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Sequence

from .availability import fragment_availability
from .model import CAPACITY_EPS, ProblemInstance
from .placement import InfeasibleError, Placement, SolveReport

#: One enumerated fragment: (master server, protection servers, fraction).
_Frag = tuple[int, frozenset[int], float]


class ExactScopeError(ValueError):
    """The instance is outside the configured bounds of the exact solver."""


@dataclass
class ExactConfig:
    max_servers: int = 4
    max_requests: int = 8
    #: Fraction granularity for split configurations (e.g. 0.5 allows
    #: halves); None restricts the search to unsplit assignments.
    split_grid: float | None = None
    time_limit: float | None = None
    #: Search nodes to visit before returning the best found so far.
    node_budget: int = 2_000_000
    #: Upfront guard: refuse when the product of per-request configuration
    #: counts exceeds this (the search would be hopeless even with pruning).
    search_space_budget: float = 1e15


@dataclass
class ExactResult:
    placement: Placement
    report: SolveReport
    optimal: bool
    nodes: int


def exact_solve(instance: ProblemInstance, config: ExactConfig | None = None) -> ExactResult:
    """Best achievable minimum availability, by exhaustive search.

    Raises ExactScopeError when the instance exceeds the configured bounds
    and InfeasibleError when no full assignment exists (or none was found
    before the budget ran out, which the message distinguishes).
    """
    config = config or ExactConfig()
    n_servers = len(instance.servers)
    n_requests = len(instance.requests)
    if n_servers > config.max_servers:
        raise ExactScopeError(
            f"{n_servers} servers exceed the exact solver bound of {config.max_servers}"
        )
    if n_requests > config.max_requests:
        raise ExactScopeError(
            f"{n_requests} requests exceed the exact solver bound of {config.max_requests}"
        )

    t0 = time.perf_counter()
    if not instance.requests:
        placement = Placement(instance)
        return ExactResult(placement, placement.evaluate(algorithm="exact"), True, 0)

    configs = [_request_configs(instance, r.id, config) for r in instance.requests]
    estimate = 1.0
    for r, c in enumerate(configs):
        if not c:
            raise InfeasibleError(f"request {instance.requests[r].name} fits no server")
        estimate *= len(c)
    if estimate > config.search_space_budget:
        raise ExactScopeError(
            f"search space of about {estimate:.3g} configurations exceeds "
            f"the budget of {config.search_space_budget:.3g}"
        )

    # Branch on hard-capped requests first: their best availability already
    # limits the objective, so conflicts surface near the root.
    order = sorted(
        range(n_requests), key=lambda r: (configs[r][0][0], r)
    )
    search = _Search(instance, config, configs, order, t0)
    search.run()
    if search.best_choice is None:
        if search.aborted:
            raise InfeasibleError(
                "no feasible assignment found before the search budget ran out"
            )
        raise InfeasibleError("no feasible assignment exists")

    placement = _materialize(instance, search.best_choice)
    report = placement.evaluate(
        algorithm="exact", runtime_s=time.perf_counter() - t0
    )
    return ExactResult(placement, report, optimal=not search.aborted, nodes=search.nodes)


class _Search:
    def __init__(self, instance, config, configs, order, t0):
        self.instance = instance
        self.config = config
        self.configs = configs
        self.order = order
        self.t0 = t0
        self.loads = [0.0] * len(instance.servers)
        #: (server, vnf) -> [reserved units, agreed protection frozenset]
        self.masters: dict[tuple[int, int], list] = {}
        self.choice: dict[int, tuple[_Frag, ...]] = {}
        self.best_obj = -math.inf
        self.best_choice: dict[int, tuple[_Frag, ...]] | None = None
        self.nodes = 0
        self.aborted = False

    def run(self) -> None:
        self._dfs(0, math.inf)

    def _dfs(self, depth: int, current_min: float) -> None:
        if self.aborted:
            return
        if depth == len(self.order):
            if current_min > self.best_obj:
                self.best_obj = current_min
                self.best_choice = dict(self.choice)
            return
        r = self.order[depth]
        req = self.instance.requests[r]
        for avail, frags in self.configs[r]:
            if self.aborted:
                return
            # Config lists are sorted best-first: once this one cannot lift
            # the objective above the incumbent, none of the rest can.
            if min(avail, current_min) <= self.best_obj:
                break
            self.nodes += 1
            if self.nodes > self.config.node_budget:
                self.aborted = True
                return
            if self.config.time_limit is not None and self.nodes % 256 == 0:
                if time.perf_counter() - self.t0 > self.config.time_limit:
                    self.aborted = True
                    return
            undo = self._apply(req, frags)
            if undo is not None:
                self.choice[r] = frags
                self._dfs(depth + 1, min(avail, current_min))
                del self.choice[r]
                self._unwind(undo)

    def _apply(self, req, frags: tuple[_Frag, ...]):
        """Charge the config against capacity; None when it does not fit."""
        inst = self.instance
        undo: list = []
        ok = True
        for master_server, protection, fraction in frags:
            units = fraction * req.demand
            key = (master_server, req.vnf)
            entry = self.masters.get(key)
            if entry is None:
                slaves = protection - {master_server}
                reserved = units
                self.masters[key] = [reserved, protection]
                delta = {master_server: units}
                for s in slaves:
                    delta[s] = delta.get(s, 0.0) + reserved
                undo.append((key, None, None, delta))
            else:
                if entry[1] != protection:
                    ok = False
                    break
                old = entry[0]
                entry[0] = old + units
                # The master grows; every protection server mirrors it.
                delta = {master_server: units}
                for s in protection - {master_server}:
                    delta[s] = delta.get(s, 0.0) + units
                undo.append((key, old, entry[1], delta))
            for s, d in undo[-1][3].items():
                self.loads[s] += d
                if self.loads[s] > inst.servers[s].capacity + CAPACITY_EPS:
                    ok = False
            if not ok:
                break
        if ok:
            return undo
        self._unwind(undo)
        return None

    def _unwind(self, undo: list) -> None:
        for key, old_reserved, old_protection, delta in reversed(undo):
            for s, d in delta.items():
                self.loads[s] -= d
            if old_reserved is None:
                del self.masters[key]
            else:
                self.masters[key][0] = old_reserved
                self.masters[key][1] = old_protection


def _request_configs(
    instance: ProblemInstance, r: int, config: ExactConfig
) -> list[tuple[float, tuple[_Frag, ...]]]:
    """All configurations of one request, best availability first."""
    req = instance.requests[r]
    n = len(instance.servers)
    single: dict[tuple[int, frozenset[int]], float] = {}
    others = list(range(n))
    for s in range(n):
        rest = [t for t in others if t != s]
        for k in range(len(rest) + 1):
            for combo in itertools.combinations(rest, k):
                protection = frozenset((s,) + combo)
                single[(s, protection)] = fragment_availability(
                    instance, req, s, protection
                )

    out: list[tuple[float, tuple[_Frag, ...]]] = []
    for parts in _fraction_layouts(config.split_grid):
        capacity_ok = lambda s, x: x * req.demand <= instance.servers[s].capacity + CAPACITY_EPS
        for masters in itertools.permutations(sorted({s for s, _ in single}), len(parts)):
            if list(masters) != sorted(masters) and len(set(parts)) == 1:
                continue  # identical fractions: master order is symmetric
            if any(not capacity_ok(s, x) for s, x in zip(masters, parts)):
                continue
            for protections in itertools.product(
                *[
                    sorted(
                        (p for (s, p) in single if s == m),
                        key=lambda p: (len(p), sorted(p)),
                    )
                    for m in masters
                ]
            ):
                frags = tuple(
                    (m, p, x) for m, p, x in zip(masters, protections, parts)
                )
                avail = 1.0
                for m, p, _ in sorted(frags, key=lambda f: f[0]):
                    avail *= single[(m, p)]
                out.append((avail, frags))
    out.sort(key=lambda e: (-e[0], _config_sort_key(e[1])))
    return out


def _config_sort_key(frags: tuple[_Frag, ...]):
    return tuple((m, x, len(p), tuple(sorted(p))) for m, p, x in frags)


def _fraction_layouts(grid: float | None) -> list[tuple[float, ...]]:
    """Fraction tuples summing to 1; just (1.0,) when splitting is off."""
    if grid is None:
        return [(1.0,)]
    steps = round(1.0 / grid)
    if not math.isclose(steps * grid, 1.0, rel_tol=0, abs_tol=1e-12) or steps < 1:
        raise ValueError("split grid must divide 1 evenly")
    layouts: list[tuple[float, ...]] = []
    for k in range(1, steps + 1):
        for combo in _compositions(steps, k):
            layouts.append(tuple(c * grid for c in combo))
    return layouts


def _compositions(total: int, k: int) -> list[tuple[int, ...]]:
    """Ordered k-part compositions of a positive integer."""
    if k == 1:
        return [(total,)]
    out = []
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            out.append((first,) + rest)
    return out


def _materialize(
    instance: ProblemInstance, choice: dict[int, tuple[_Frag, ...]]
) -> Placement:
    placement = Placement(instance)
    for r in sorted(choice):
        for master, _, fraction in sorted(choice[r]):
            placement.assign_fraction(r, master, fraction)
    protections: dict[tuple[int, int], frozenset[int]] = {}
    for r, frags in choice.items():
        vnf = instance.requests[r].vnf
        for master, protection, _ in frags:
            protections[(master, vnf)] = protection
    for key in sorted(protections):
        for s in sorted(protections[key] - {key[0]}):
            placement.add_slave(key, s)
    return placement
