"""Mutable placement state with reservation ledgers.

A placement tracks, for one problem instance:

* master instances: at most one per (server, VNF type), each reserving
  exactly the demand assigned to it,
* slave instances: replicas protecting one master each, hosted on a
  different server, reserving at least as much as their master,
* assignments: how each request's demand splits into fragments across
  master servers (fractions of the request demand).

Capacity bookkeeping is exact by construction: every reserved quantity is
recomputed as a sum over its parts in a canonical order whenever the parts
change, so an incremental ledger never drifts away from a from-scratch
recomputation. Operations validate before mutating anything; a rejected
operation leaves the placement untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .availability import configuration_availability, fragment_detail
from .model import AVAIL_EPS, CAPACITY_EPS, ProblemInstance

#: Fraction sums within this slack of 1 count as fully assigned.
ASSIGN_EPS = 1e-9


class OperationRejected(Exception):
    """A placement operation failed validation; nothing was changed."""


class InfeasibleError(Exception):
    """No placement satisfying the capacity constraints was found."""


class MasterInstance:
    """One master VNF instance on a server, plus the slaves protecting it."""

    __slots__ = ("server", "vnf", "demands", "reserved", "slaves")

    def __init__(self, server: int, vnf: int):
        self.server = server
        self.vnf = vnf
        self.demands: dict[int, float] = {}
        self.reserved = 0.0
        self.slaves: dict[int, float] = {}

    def recompute_reserved(self) -> None:
        self.reserved = _ordered_sum(self.demands)

    def protection(self) -> frozenset[int]:
        return frozenset(self.slaves) | {self.server}


@dataclass
class SolveReport:
    """Outcome of evaluating or solving a placement."""

    objective: float
    worst_requests: tuple[int, ...]
    per_request: dict[int, float]
    splits: int
    vacuous: bool = False
    runtime_s: float = 0.0
    algorithm: str = ""


class Placement:
    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        #: (server id, vnf id) -> master instance
        self.masters: dict[tuple[int, int], MasterInstance] = {}
        #: request id -> {master server id -> fraction of the request demand}
        self.assignments: dict[int, dict[int, float]] = {}
        # Per-server membership ledger: sort key -> reserved units. Keys are
        # ("m", vnf) for masters and ("s", master server, vnf) for slaves.
        self._members: list[dict[tuple, float]] = [{} for _ in instance.servers]
        self._load: list[float] = [0.0 for _ in instance.servers]
        self._avail: dict[int, float] = {}
        self._dirty: set[int] = set(r.id for r in instance.requests)

    # -- read access ------------------------------------------------------

    def load(self, server: int) -> float:
        return self._load[server]

    def residual(self, server: int) -> float:
        return self.instance.servers[server].capacity - self._load[server]

    def fractions(self, request: int) -> dict[int, float]:
        return dict(self.assignments.get(request, {}))

    def request_fragments(self, request: int) -> list[tuple[int, frozenset[int]]]:
        """Fragments of a request as (master server, protection set) pairs."""
        vnf = self.instance.requests[request].vnf
        out = []
        for server in sorted(self.assignments.get(request, {})):
            out.append((server, self.masters[(server, vnf)].protection()))
        return out

    def master_reservations(self) -> dict[tuple[int, int], float]:
        """(vnf, server) -> reserved units, for every master instance."""
        return {(m.vnf, m.server): m.reserved for m in self.masters.values()}

    def slave_reservations(self) -> dict[tuple[int, int, int], float]:
        """(vnf, master server, slave server) -> reserved units."""
        out = {}
        for m in self.masters.values():
            for s, units in m.slaves.items():
                out[(m.vnf, m.server, s)] = units
        return out

    def is_complete(self) -> bool:
        for r in self.instance.requests:
            total = sum(self.assignments.get(r.id, {}).values())
            if abs(total - 1.0) > ASSIGN_EPS:
                return False
        return True

    # -- operations -------------------------------------------------------

    def assign_fraction(self, request: int, server: int, fraction: float) -> None:
        """Assign a fraction of a request's demand to a master on the server.

        Creates the master if none exists; merges with an existing fragment
        of the same request on that server otherwise. Growing a master grows
        its slaves to match; a slave whose server cannot absorb the growth is
        dropped rather than blocking the assignment.
        """
        inst = self.instance
        req = inst.requests[request]
        if req.vnf < 0:
            raise OperationRejected(f"request {req.name} has no resolved VNF type")
        if fraction <= 0.0:
            raise OperationRejected("fraction must be positive")
        frags = self.assignments.get(request, {})
        total = sum(frags.values()) + fraction
        if total > 1.0 + ASSIGN_EPS:
            raise OperationRejected(
                f"request {req.name}: fractions would sum to {total:.12g}"
            )
        key = (server, req.vnf)
        master = self.masters.get(key)
        new_fraction = frags.get(server, 0.0) + fraction
        new_units = new_fraction * req.demand

        demands = dict(master.demands) if master else {}
        demands[request] = new_units
        new_reserved = _ordered_sum(demands)
        old_reserved = master.reserved if master else 0.0
        load_after = self._load_with(server, ("m", req.vnf), new_reserved)
        if load_after > inst.servers[server].capacity + CAPACITY_EPS:
            raise OperationRejected(
                f"server {inst.servers[server].name}: capacity exceeded "
                f"({load_after:.12g} > {inst.servers[server].capacity:g})"
            )

        # Validation passed; mutate.
        if master is None:
            master = MasterInstance(server, req.vnf)
            self.masters[key] = master
        master.demands[request] = new_units
        master.recompute_reserved()
        self._set_member(server, ("m", req.vnf), master.reserved)
        self.assignments.setdefault(request, {})[server] = new_fraction
        self._dirty.add(request)
        if new_reserved > old_reserved:
            self._grow_slaves(master)

    def remove_fragment(self, request: int, server: int) -> None:
        """Remove a request's fragment from a master server.

        The master shrinks by the fragment's demand; its slaves keep their
        current reservations. A master left with no demand disappears along
        with its slaves.
        """
        req = self.instance.requests[request]
        frags = self.assignments.get(request, {})
        if server not in frags:
            raise OperationRejected(
                f"request {req.name} has no fragment on server "
                f"{self.instance.servers[server].name}"
            )
        master = self.masters[(server, req.vnf)]
        del frags[server]
        if not frags:
            del self.assignments[request]
        del master.demands[request]
        self._dirty.add(request)
        if not master.demands:
            self._discard_master(master)
        else:
            master.recompute_reserved()
            self._set_member(server, ("m", req.vnf), master.reserved)

    def add_slave(
        self, master_key: tuple[int, int], server: int, reserved: float | None = None
    ) -> None:
        """Place a slave for the master on the given server.

        The slave reserves the master's current demand unless an explicit
        larger reservation is given (used when restoring exported state).
        """
        master = self._get_master(master_key)
        if server == master.server:
            raise OperationRejected("slave must sit on a different server")
        if server in master.slaves:
            raise OperationRejected("master already has a slave on that server")
        units = master.reserved if reserved is None else reserved
        if units < master.reserved:
            raise OperationRejected("slave cannot reserve less than its master")
        cap = self.instance.servers[server].capacity
        if self._load[server] + units > cap + CAPACITY_EPS:
            raise OperationRejected(
                f"server {self.instance.servers[server].name}: no capacity for slave"
            )
        master.slaves[server] = units
        self._set_member(server, ("s", master.server, master.vnf), units)
        self._dirty.update(master.demands)

    def remove_slave(self, master_key: tuple[int, int], server: int) -> None:
        master = self._get_master(master_key)
        if server not in master.slaves:
            raise OperationRejected("no such slave")
        del master.slaves[server]
        self._set_member(server, ("s", master.server, master.vnf), None)
        self._dirty.update(master.demands)

    def move_master(self, master_key: tuple[int, int], target: int) -> None:
        """Relocate a master instance, carrying its assigned requests along.

        A slave of the same master already on the target server is dropped
        (a master cannot be protected by its own server). Slaves elsewhere
        are kept.
        """
        master = self._get_master(master_key)
        if target == master.server:
            raise OperationRejected("master is already on that server")
        if (target, master.vnf) in self.masters:
            raise OperationRejected("target server already hosts a master of this type")
        load_after = self._load_with(target, ("m", master.vnf), master.reserved)
        if target in master.slaves:
            load_after -= master.slaves[target]
        if load_after > self.instance.servers[target].capacity + CAPACITY_EPS:
            raise OperationRejected("target server lacks capacity")

        source = master.server
        del self.masters[master_key]
        self._set_member(source, ("m", master.vnf), None)
        if target in master.slaves:
            del master.slaves[target]
            self._set_member(target, ("s", source, master.vnf), None)
        # Slave ledger keys embed the master's server; rekey them.
        for s, units in master.slaves.items():
            self._set_member(s, ("s", source, master.vnf), None)
            self._set_member(s, ("s", target, master.vnf), units)
        master.server = target
        self.masters[(target, master.vnf)] = master
        self._set_member(target, ("m", master.vnf), master.reserved)
        for r in master.demands:
            frags = self.assignments[r]
            frags[target] = frags.pop(source)
        self._dirty.update(master.demands)

    def swap_instances(
        self,
        a: tuple,
        b: tuple | None,
        target: int | None = None,
    ) -> None:
        """Exchange the servers of two instances, or relocate one.

        Descriptors are ``("master", server, vnf)`` or
        ``("slave", master_server, vnf, host)``. With ``b`` None the
        instance ``a`` moves to ``target`` instead (the degenerate swap
        with an empty slot). Masters carry their assigned requests; a
        moving master whose own slave sits on the arrival server drops
        that slave. All validation happens before any mutation.
        """
        kind_a, host_a, size_a, master_a = self._resolve_instance(a)
        if b is None:
            if target is None:
                raise OperationRejected("relocation needs a target server")
            if kind_a == "master":
                self.move_master((host_a, master_a.vnf), target)
            else:
                self.move_slave((master_a.server, master_a.vnf), host_a, target)
            return
        kind_b, host_b, size_b, master_b = self._resolve_instance(b)
        if host_a == host_b:
            raise OperationRejected("instances share a server already")

        # Where each involved master ends up after the swap.
        def final_server(m: MasterInstance) -> int:
            if kind_a == "master" and m is master_a:
                return host_b
            if kind_b == "master" and m is master_b:
                return host_a
            return m.server

        # Master slots on the destination servers must be free.
        if kind_a == "master":
            occupant = self.masters.get((host_b, master_a.vnf))
            if occupant is not None and occupant is not master_b:
                raise OperationRejected("destination hosts a master of the same type")
        if kind_b == "master":
            occupant = self.masters.get((host_a, master_b.vnf))
            if occupant is not None and occupant is not master_a:
                raise OperationRejected("destination hosts a master of the same type")

        # Slaves must land away from their (possibly moved) master and must
        # not collide with a sibling slave. The sibling on the destination
        # is the swap partner itself exactly when both belong to one master.
        if kind_a == "slave":
            if host_b == final_server(master_a):
                raise OperationRejected("slave would land on its master's server")
            if host_b in master_a.slaves and not (
                kind_b == "slave" and master_b is master_a
            ):
                raise OperationRejected("master already has a slave on that server")
        if kind_b == "slave":
            if host_a == final_server(master_b):
                raise OperationRejected("slave would land on its master's server")
            if host_a in master_b.slaves and not (
                kind_a == "slave" and master_a is master_b
            ):
                raise OperationRejected("master already has a slave on that server")

        # A master arriving where its own slave lives drops that slave,
        # unless that slave is the swap partner (it is moving away anyway).
        drop_a = (
            kind_a == "master"
            and host_b in master_a.slaves
            and not (kind_b == "slave" and master_b is master_a)
        )
        drop_b = (
            kind_b == "master"
            and host_a in master_b.slaves
            and not (kind_a == "slave" and master_a is master_b)
        )

        delta_host_a = size_b - size_a
        if drop_b:
            delta_host_a -= master_b.slaves[host_a]
        delta_host_b = size_a - size_b
        if drop_a:
            delta_host_b -= master_a.slaves[host_b]
        for host, delta in ((host_a, delta_host_a), (host_b, delta_host_b)):
            cap = self.instance.servers[host].capacity
            if self._load[host] + delta > cap + CAPACITY_EPS:
                raise OperationRejected(
                    f"server {self.instance.servers[host].name} lacks capacity for the swap"
                )

        # Validation passed; mutate. Assignment and slave-ledger rekeys are
        # two-phase (clear everything, then rewrite from the final state) so
        # that same-type master swaps cannot collide on a shared request or
        # on slaves they keep on a common third server.
        saved_a = {}
        saved_b = {}
        if kind_a == "master":
            saved_a = {r: self.assignments[r].pop(host_a) for r in master_a.demands}
        if kind_b == "master":
            saved_b = {r: self.assignments[r].pop(host_b) for r in master_b.demands}
        involved = {id(master_a): master_a, id(master_b): master_b}
        for m in involved.values():
            for s in m.slaves:
                self._set_member(s, ("s", m.server, m.vnf), None)
        if kind_a == "master":
            del self.masters[(host_a, master_a.vnf)]
            self._set_member(host_a, ("m", master_a.vnf), None)
        else:
            del master_a.slaves[host_a]
        if kind_b == "master":
            del self.masters[(host_b, master_b.vnf)]
            self._set_member(host_b, ("m", master_b.vnf), None)
        else:
            del master_b.slaves[host_b]
        if drop_a:
            del master_a.slaves[host_b]
        if drop_b:
            del master_b.slaves[host_a]
        if kind_a == "master":
            master_a.server = host_b
            self.masters[(host_b, master_a.vnf)] = master_a
            self._set_member(host_b, ("m", master_a.vnf), master_a.reserved)
        else:
            master_a.slaves[host_b] = size_a
        if kind_b == "master":
            master_b.server = host_a
            self.masters[(host_a, master_b.vnf)] = master_b
            self._set_member(host_a, ("m", master_b.vnf), master_b.reserved)
        else:
            master_b.slaves[host_a] = size_b
        for m in involved.values():
            for s, units in m.slaves.items():
                self._set_member(s, ("s", m.server, m.vnf), units)
        for r, fraction in saved_a.items():
            self.assignments[r][host_b] = fraction
        for r, fraction in saved_b.items():
            self.assignments[r][host_a] = fraction
        self._dirty.update(master_a.demands)
        self._dirty.update(master_b.demands)

    def _resolve_instance(self, desc: tuple):
        """Descriptor -> (kind, host server, size, master object)."""
        if desc[0] == "master":
            _, server, vnf = desc
            master = self._get_master((server, vnf))
            return "master", server, master.reserved, master
        if desc[0] == "slave":
            _, mserver, vnf, host = desc
            master = self._get_master((mserver, vnf))
            if host not in master.slaves:
                raise OperationRejected(f"no slave of {(mserver, vnf)} on server {host}")
            return "slave", host, master.slaves[host], master
        raise OperationRejected(f"unknown instance descriptor {desc!r}")

    def move_slave(self, master_key: tuple[int, int], source: int, target: int) -> None:
        master = self._get_master(master_key)
        if source not in master.slaves:
            raise OperationRejected("no such slave")
        if target == master.server:
            raise OperationRejected("slave must sit on a different server")
        if target in master.slaves:
            raise OperationRejected("master already has a slave on the target server")
        units = master.slaves[source]
        if self._load[target] + units > self.instance.servers[target].capacity + CAPACITY_EPS:
            raise OperationRejected("target server lacks capacity")
        del master.slaves[source]
        self._set_member(source, ("s", master.server, master.vnf), None)
        master.slaves[target] = units
        self._set_member(target, ("s", master.server, master.vnf), units)
        self._dirty.update(master.demands)

    # -- evaluation -------------------------------------------------------

    def evaluate(self, algorithm: str = "", runtime_s: float = 0.0) -> SolveReport:
        """Availability report for a fully assigned placement.

        Raises ValueError when some request is not fully assigned; an empty
        request set yields objective 1.0 flagged vacuous.
        """
        inst = self.instance
        if not inst.requests:
            return SolveReport(1.0, (), {}, 0, vacuous=True,
                               runtime_s=runtime_s, algorithm=algorithm)
        for req in inst.requests:
            total = sum(self.assignments.get(req.id, {}).values())
            if abs(total - 1.0) > ASSIGN_EPS:
                raise ValueError(
                    f"request {req.name} is not fully assigned "
                    f"(fractions sum to {total:.12g})"
                )
        for r in self._dirty:
            self._avail[r] = configuration_availability(
                inst, inst.requests[r], self.request_fragments(r)
            )
        self._dirty.clear()
        objective = min(self._avail.values())
        worst = tuple(
            sorted(r for r, a in self._avail.items() if a <= objective + AVAIL_EPS)
        )
        splits = sum(1 for f in self.assignments.values() if len(f) > 1)
        return SolveReport(
            objective=objective,
            worst_requests=worst,
            per_request=dict(self._avail),
            splits=splits,
            runtime_s=runtime_s,
            algorithm=algorithm,
        )

    def availability_detail(self, request: int) -> dict[str, Any]:
        """Per-fragment and per-cluster availability breakdown for one request."""
        inst = self.instance
        req = inst.requests[request]
        frags = []
        total = 1.0
        for master, protection in self.request_fragments(request):
            detail = fragment_detail(inst, req, master, protection)
            total *= detail["availability"]
            frags.append(
                {
                    "master": inst.servers[master].name,
                    "protection": sorted(inst.servers[s].name for s in protection),
                    "fraction": self.assignments[request][master],
                    **detail,
                }
            )
        return {"request": req.name, "availability": total, "fragments": frags}

    # -- bookkeeping ------------------------------------------------------

    def clone(self) -> "Placement":
        out = Placement.__new__(Placement)
        out.instance = self.instance
        out.masters = {}
        for key, m in self.masters.items():
            c = MasterInstance(m.server, m.vnf)
            c.demands = dict(m.demands)
            c.reserved = m.reserved
            c.slaves = dict(m.slaves)
            out.masters[key] = c
        out.assignments = {r: dict(f) for r, f in self.assignments.items()}
        out._members = [dict(m) for m in self._members]
        out._load = list(self._load)
        out._avail = dict(self._avail)
        out._dirty = set(self._dirty)
        return out

    def _get_master(self, key: tuple[int, int]) -> MasterInstance:
        master = self.masters.get(key)
        if master is None:
            raise OperationRejected(f"no master instance at {key}")
        return master

    def _set_member(self, server: int, key: tuple, units: float | None) -> None:
        members = self._members[server]
        if units is None:
            members.pop(key, None)
        else:
            members[key] = units
        self._load[server] = _ordered_sum(members)

    def _load_with(self, server: int, key: tuple, units: float) -> float:
        trial = dict(self._members[server])
        trial[key] = units
        return _ordered_sum(trial)

    def _grow_slaves(self, master: MasterInstance) -> None:
        for s in list(master.slaves):
            units = master.slaves[s]
            if units >= master.reserved:
                continue
            load_after = self._load_with(
                s, ("s", master.server, master.vnf), master.reserved
            )
            if load_after > self.instance.servers[s].capacity + CAPACITY_EPS:
                del master.slaves[s]
                self._set_member(s, ("s", master.server, master.vnf), None)
            else:
                master.slaves[s] = master.reserved
                self._set_member(s, ("s", master.server, master.vnf), master.reserved)
            self._dirty.update(master.demands)

    def _discard_master(self, master: MasterInstance) -> None:
        for s in list(master.slaves):
            self._set_member(s, ("s", master.server, master.vnf), None)
        del self.masters[(master.server, master.vnf)]
        self._set_member(master.server, ("m", master.vnf), None)


def verify_placement(placement: Placement, complete: bool = True) -> list[str]:
    """From-scratch constraint check; empty list means all constraints hold.

    Checks assignment completeness (when `complete`), reservation coverage,
    server capacities, protection consistency and the structural rules, plus
    exact agreement between the incremental ledgers and a recomputation.
    """
    inst = placement.instance
    out: list[str] = []

    for key, m in placement.masters.items():
        if key != (m.server, m.vnf):
            out.append(f"master ledger key {key} disagrees with instance fields")
        if not m.demands:
            out.append(f"master {key} has no assigned demand")
        if m.reserved != _ordered_sum(m.demands):
            out.append(f"master {key}: reserved drifted from its demand sum")
        for r, units in m.demands.items():
            frac = placement.assignments.get(r, {}).get(m.server)
            if frac is None:
                out.append(f"master {key}: request {r} not assigned to it")
            elif units != frac * inst.requests[r].demand:
                out.append(f"master {key}: request {r} reserves {units}, not fraction*demand")
        for s, units in m.slaves.items():
            if s == m.server:
                out.append(f"master {key}: slave on the master's own server")
            if units < m.reserved:
                out.append(f"master {key}: slave on {s} reserves {units} < {m.reserved}")

    for r, frags in placement.assignments.items():
        req = inst.requests[r]
        for server, fraction in frags.items():
            if not 0.0 < fraction <= 1.0 + ASSIGN_EPS:
                out.append(f"request {req.name}: fraction {fraction} out of range")
            if (server, req.vnf) not in placement.masters:
                out.append(f"request {req.name}: fragment on {server} has no master")
        total = sum(frags.values())
        if total > 1.0 + ASSIGN_EPS:
            out.append(f"request {req.name}: fractions sum to {total:.12g} > 1")
        if complete and abs(total - 1.0) > ASSIGN_EPS:
            out.append(f"request {req.name}: not fully assigned ({total:.12g})")
    if complete:
        for req in inst.requests:
            if req.id not in placement.assignments:
                out.append(f"request {req.name}: not assigned at all")

    # Rebuild the per-server ledgers from the master list and compare exactly.
    members: list[dict[tuple, float]] = [{} for _ in inst.servers]
    for m in placement.masters.values():
        members[m.server][("m", m.vnf)] = m.reserved
        for s, units in m.slaves.items():
            members[s][("s", m.server, m.vnf)] = units
    for s in range(len(inst.servers)):
        if members[s] != placement._members[s]:
            out.append(f"server {inst.servers[s].name}: membership ledger drifted")
        load = _ordered_sum(members[s])
        if load != placement._load[s]:
            out.append(f"server {inst.servers[s].name}: load ledger drifted")
        if load > inst.servers[s].capacity + CAPACITY_EPS:
            out.append(
                f"server {inst.servers[s].name}: capacity exceeded "
                f"({load:.12g} > {inst.servers[s].capacity:g})"
            )
    return out


def export_placement(placement: Placement) -> dict[str, Any]:
    """Placement as a JSON-ready document (stable ordering, names not ids)."""
    inst = placement.instance
    instances = []
    for (server, vnf) in sorted(placement.masters):
        m = placement.masters[(server, vnf)]
        instances.append(
            {
                "server": inst.servers[server].name,
                "vnf": inst.vnf_types[vnf].name,
                "role": "master",
                "reserved": m.reserved,
            }
        )
        for s in sorted(m.slaves):
            instances.append(
                {
                    "server": inst.servers[s].name,
                    "vnf": inst.vnf_types[vnf].name,
                    "role": "slave",
                    "reserved": m.slaves[s],
                    "master": inst.servers[server].name,
                }
            )
    assignments = []
    for r in sorted(placement.assignments):
        req = inst.requests[r]
        frags = []
        for server, protection in placement.request_fragments(r):
            frags.append(
                {
                    "master": inst.servers[server].name,
                    "protection": sorted(inst.servers[s].name for s in protection),
                    "fraction": placement.assignments[r][server],
                }
            )
        assignments.append({"request": req.name, "fragments": frags})
    return {"instances": instances, "assignments": assignments}


def import_placement(instance: ProblemInstance, doc: Mapping[str, Any]) -> Placement:
    """Rebuild a placement from an exported document."""
    servers = {s.name: s.id for s in instance.servers}
    vnfs = {v.name: v.id for v in instance.vnf_types}
    requests = {r.name: r.id for r in instance.requests}
    placement = Placement(instance)
    try:
        for entry in doc["assignments"]:
            r = requests[entry["request"]]
            for frag in entry["fragments"]:
                placement.assign_fraction(r, servers[frag["master"]], frag["fraction"])
        for entry in doc["instances"]:
            if entry["role"] != "slave":
                continue
            key = (servers[entry["master"]], vnfs[entry["vnf"]])
            placement.add_slave(key, servers[entry["server"]], entry["reserved"])
    except KeyError as exc:
        raise OperationRejected(f"placement document references unknown entity: {exc}")
    return placement


def placement_json(placement: Placement) -> str:
    return json.dumps(export_placement(placement), indent=2) + "\n"


def _ordered_sum(values: Mapping[Any, float]) -> float:
    total = 0.0
    for k in sorted(values):
        total += values[k]
    return total
