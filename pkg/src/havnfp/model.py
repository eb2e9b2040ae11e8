"""Problem model: NFV infrastructure plus client requests.

An instance couples a physical infrastructure (clusters of servers, access
points, access and synchronization links) with a set of client requests,
each asking for one VNF type with a real-valued demand. Every component
carries an availability: the probability that it is up at a random point
in time. Missing links are equivalent to links with availability 0.

Entities are referenced by dense integer ids inside the package; the JSON
interchange format uses names. Loading sorts every collection by name and
assigns ids in that order, so canonical documents map to stable ids.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping

# Capacity comparisons tolerate this absolute slack (resource units).
CAPACITY_EPS = 1e-9
# Availability comparisons (objective ties, worst sets) use this slack.
AVAIL_EPS = 1e-12


class InstanceError(ValueError):
    """An instance document cannot be parsed into a model."""


@dataclass(frozen=True)
class Cluster:
    id: int
    name: str
    availability: float


@dataclass(frozen=True)
class Server:
    id: int
    name: str
    cluster: int
    capacity: float
    availability: float


@dataclass(frozen=True)
class VnfType:
    id: int
    name: str
    availability: float


@dataclass(frozen=True)
class AccessPoint:
    id: int
    name: str


@dataclass(frozen=True)
class Request:
    id: int
    name: str
    vnf: int
    access_points: tuple[int, ...]
    demand: float


@dataclass(eq=False)
class ProblemInstance:
    clusters: tuple[Cluster, ...]
    servers: tuple[Server, ...]
    vnf_types: tuple[VnfType, ...]
    access_points: tuple[AccessPoint, ...]
    requests: tuple[Request, ...]
    #: (cluster id, access point id) -> availability
    access_links: dict[tuple[int, int], float]
    #: (cluster id, cluster id) with the lower id first -> availability
    sync_links: dict[tuple[int, int], float]
    #: reference problems recorded while parsing, reported by validate()
    parse_violations: tuple[str, ...] = ()

    @cached_property
    def servers_by_cluster(self) -> tuple[tuple[int, ...], ...]:
        groups: list[list[int]] = [[] for _ in self.clusters]
        for s in self.servers:
            if 0 <= s.cluster < len(self.clusters):
                groups[s.cluster].append(s.id)
        return tuple(tuple(g) for g in groups)

    def access_link(self, cluster: int, access_point: int) -> float:
        return self.access_links.get((cluster, access_point), 0.0)

    def sync_link(self, a: int, b: int) -> float:
        if a == b:
            return 1.0
        key = (a, b) if a < b else (b, a)
        return self.sync_links.get(key, 0.0)

    def total_demand(self) -> float:
        return sum(r.demand for r in self.requests)

    def total_capacity(self) -> float:
        return sum(s.capacity for s in self.servers)


def instance_from_doc(doc: Mapping[str, Any]) -> ProblemInstance:
    """Build a typed instance from a parsed JSON document.

    Structural problems (missing keys, wrong types, duplicate names) raise
    InstanceError. Dangling references are tolerated: the entity is kept
    with a sentinel id of -1 and the problem is reported by validate(), so
    one call collects every defect of a document.
    """
    if not isinstance(doc, Mapping):
        raise InstanceError("instance document must be a JSON object")
    violations: list[str] = []

    clusters = _parse_named(doc, "clusters", ("availability",))
    servers = _parse_named(doc, "servers", ("cluster", "capacity", "availability"))
    vnfs = _parse_named(doc, "vnf_types", ("availability",))
    aps = _parse_named(doc, "access_points", ())
    requests = _parse_named(doc, "requests", ("vnf", "access_points", "demand"))

    cluster_ids = {e["name"]: i for i, e in enumerate(clusters)}
    server_names = {e["name"] for e in servers}
    vnf_ids = {e["name"]: i for i, e in enumerate(vnfs)}
    ap_ids = {e["name"]: i for i, e in enumerate(aps)}
    _ = server_names  # uniqueness already enforced by _parse_named

    cluster_objs = tuple(
        Cluster(i, e["name"], _number(e, "availability", f"clusters[{e['name']}]"))
        for i, e in enumerate(clusters)
    )
    vnf_objs = tuple(
        VnfType(i, e["name"], _number(e, "availability", f"vnf_types[{e['name']}]"))
        for i, e in enumerate(vnfs)
    )
    ap_objs = tuple(AccessPoint(i, e["name"]) for i, e in enumerate(aps))

    server_objs = []
    for i, e in enumerate(servers):
        where = f"servers[{e['name']}]"
        cname = e["cluster"]
        cid = cluster_ids.get(cname, -1)
        if cid < 0:
            violations.append(f"{where}: unknown cluster {cname!r}")
        server_objs.append(
            Server(
                i,
                e["name"],
                cid,
                _number(e, "capacity", where),
                _number(e, "availability", where),
            )
        )

    request_objs = []
    for i, e in enumerate(requests):
        where = f"requests[{e['name']}]"
        vname = e["vnf"]
        vid = vnf_ids.get(vname, -1)
        if vid < 0:
            violations.append(f"{where}: unknown VNF type {vname!r}")
        raw_aps = e["access_points"]
        if not isinstance(raw_aps, (list, tuple)):
            raise InstanceError(f"{where}: access_points must be a list")
        resolved = []
        for pname in raw_aps:
            pid = ap_ids.get(pname, -1)
            if pid < 0:
                violations.append(f"{where}: unknown access point {pname!r}")
            else:
                resolved.append(pid)
        request_objs.append(
            Request(
                i,
                e["name"],
                vid,
                tuple(sorted(set(resolved))),
                _number(e, "demand", where),
            )
        )

    access_links: dict[tuple[int, int], float] = {}
    for j, e in enumerate(doc.get("access_links", [])):
        where = f"access_links[{j}]"
        _require_keys(e, ("cluster", "access_point", "availability"), where)
        cid = cluster_ids.get(e["cluster"], -1)
        pid = ap_ids.get(e["access_point"], -1)
        a = _number(e, "availability", where)
        if cid < 0:
            violations.append(f"{where}: unknown cluster {e['cluster']!r}")
        elif pid < 0:
            violations.append(f"{where}: unknown access point {e['access_point']!r}")
        else:
            if (cid, pid) in access_links:
                raise InstanceError(f"{where}: duplicate link")
            access_links[(cid, pid)] = a

    sync_links: dict[tuple[int, int], float] = {}
    for j, e in enumerate(doc.get("sync_links", [])):
        where = f"sync_links[{j}]"
        _require_keys(e, ("cluster_a", "cluster_b", "availability"), where)
        ca = cluster_ids.get(e["cluster_a"], -1)
        cb = cluster_ids.get(e["cluster_b"], -1)
        a = _number(e, "availability", where)
        if ca < 0 or cb < 0:
            bad = e["cluster_a"] if ca < 0 else e["cluster_b"]
            violations.append(f"{where}: unknown cluster {bad!r}")
        elif ca == cb:
            raise InstanceError(f"{where}: link endpoints must differ")
        else:
            key = (min(ca, cb), max(ca, cb))
            if key in sync_links:
                raise InstanceError(f"{where}: duplicate link")
            sync_links[key] = a

    return ProblemInstance(
        clusters=cluster_objs,
        servers=tuple(server_objs),
        vnf_types=vnf_objs,
        access_points=ap_objs,
        requests=tuple(request_objs),
        access_links=access_links,
        sync_links=sync_links,
        parse_violations=tuple(violations),
    )


def validate(instance: ProblemInstance) -> list[str]:
    """Collect every model violation; empty list means the instance is sound.

    A total demand exceeding total capacity is reported as a warning entry
    rather than an error: such instances are loadable and solvable (the
    solvers will report infeasibility where it actually bites).
    """
    out = list(instance.parse_violations)
    for c in instance.clusters:
        _check_prob(out, f"cluster {c.name}", c.availability)
    for v in instance.vnf_types:
        _check_prob(out, f"vnf_type {v.name}", v.availability)
    for s in instance.servers:
        _check_prob(out, f"server {s.name}", s.availability)
        if not s.capacity > 0:
            out.append(f"server {s.name}: capacity must be positive, got {s.capacity!r}")
    for (cid, pid), a in instance.access_links.items():
        if not 0.0 <= a <= 1.0:
            cname = instance.clusters[cid].name
            pname = instance.access_points[pid].name
            out.append(f"access link ({cname}, {pname}): availability must be in [0, 1], got {a!r}")
    for (ca, cb), a in instance.sync_links.items():
        if not 0.0 <= a <= 1.0:
            na, nb = instance.clusters[ca].name, instance.clusters[cb].name
            out.append(f"sync link ({na}, {nb}): availability must be in [0, 1], got {a!r}")
    for r in instance.requests:
        if not r.demand > 0:
            out.append(f"request {r.name}: demand must be positive, got {r.demand!r}")
        if not r.access_points and r.vnf >= 0:
            out.append(f"request {r.name}: no usable access points")
    demand, capacity = instance.total_demand(), instance.total_capacity()
    if demand > capacity + CAPACITY_EPS:
        out.append(
            f"warning: total demand {demand:g} exceeds total capacity {capacity:g}"
        )
    return out


def instance_to_doc(instance: ProblemInstance) -> dict[str, Any]:
    """Rebuild the canonical JSON document (plain dicts/lists, sorted by name)."""
    _require_resolved(instance)
    cname = [c.name for c in instance.clusters]
    pname = [p.name for p in instance.access_points]
    return {
        "clusters": [
            {"name": c.name, "availability": c.availability} for c in instance.clusters
        ],
        "servers": [
            {
                "name": s.name,
                "cluster": cname[s.cluster],
                "capacity": s.capacity,
                "availability": s.availability,
            }
            for s in instance.servers
        ],
        "vnf_types": [
            {"name": v.name, "availability": v.availability} for v in instance.vnf_types
        ],
        "access_points": [{"name": p.name} for p in instance.access_points],
        "access_links": [
            {"cluster": cname[c], "access_point": pname[p], "availability": a}
            for (c, p), a in sorted(
                instance.access_links.items(), key=lambda kv: (cname[kv[0][0]], pname[kv[0][1]])
            )
        ],
        "sync_links": [
            {"cluster_a": cname[a], "cluster_b": cname[b], "availability": v}
            for (a, b), v in sorted(
                instance.sync_links.items(), key=lambda kv: (cname[kv[0][0]], cname[kv[0][1]])
            )
        ],
        "requests": [
            {
                "name": r.name,
                "vnf": instance.vnf_types[r.vnf].name,
                "access_points": [pname[p] for p in r.access_points],
                "demand": r.demand,
            }
            for r in instance.requests
        ],
    }


def canonical_text(instance: ProblemInstance) -> str:
    """Serialize to the canonical byte-stable JSON text.

    Probabilities are printed with 17 significant digits so every float
    round-trips exactly; demands and capacities print as integers when they
    are integral. Collections are sorted by name. The output is a fixed
    point: loading it and serializing again reproduces it byte for byte.
    """
    doc = instance_to_doc(instance)
    lines = ["{"]
    sections = []
    sections.append(_emit_array("clusters", doc["clusters"], _emit_availability_entity))
    sections.append(_emit_array("servers", doc["servers"], _emit_server))
    sections.append(_emit_array("vnf_types", doc["vnf_types"], _emit_availability_entity))
    sections.append(_emit_array("access_points", doc["access_points"], _emit_name_only))
    sections.append(_emit_array("access_links", doc["access_links"], _emit_access_link))
    sections.append(_emit_array("sync_links", doc["sync_links"], _emit_sync_link))
    sections.append(_emit_array("requests", doc["requests"], _emit_request))
    lines.append(",\n".join(sections))
    lines.append("}")
    return "\n".join(lines) + "\n"


def canonicalize(doc: Mapping[str, Any]) -> str:
    """Parse a document and re-emit it in canonical form."""
    return canonical_text(instance_from_doc(doc))


def load_instance(path: str | Path) -> ProblemInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    return loads_instance(text)


def loads_instance(text: str) -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    return instance_from_doc(doc)


def save_instance(instance: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(canonical_text(instance))


# ---------------------------------------------------------------------------
# parsing and emission helpers

def _parse_named(
    doc: Mapping[str, Any], key: str, fields: tuple[str, ...]
) -> list[dict[str, Any]]:
    raw = doc.get(key)
    if raw is None:
        raise InstanceError(f"missing required key {key!r}")
    if not isinstance(raw, list):
        raise InstanceError(f"{key} must be a list")
    seen: set[str] = set()
    out = []
    for j, e in enumerate(raw):
        where = f"{key}[{j}]"
        if not isinstance(e, Mapping):
            raise InstanceError(f"{where}: must be an object")
        _require_keys(e, ("name",) + fields, where)
        name = e["name"]
        if not isinstance(name, str) or not name:
            raise InstanceError(f"{where}: name must be a non-empty string")
        if name in seen:
            raise InstanceError(f"{key}: duplicate name {name!r}")
        seen.add(name)
        out.append(dict(e))
    out.sort(key=lambda e: e["name"])
    return out


def _require_keys(e: Mapping[str, Any], keys: Iterable[str], where: str) -> None:
    if not isinstance(e, Mapping):
        raise InstanceError(f"{where}: must be an object")
    for k in keys:
        if k not in e:
            raise InstanceError(f"{where}: missing field {k!r}")


def _number(e: Mapping[str, Any], key: str, where: str) -> float:
    v = e[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InstanceError(f"{where}: {key} must be a finite number, got {v!r}")
    return float(v)


def _check_prob(out: list[str], what: str, a: float) -> None:
    if not 0.0 < a <= 1.0:
        out.append(f"{what}: availability must be in (0, 1], got {a!r}")


def _require_resolved(instance: ProblemInstance) -> None:
    if any(s.cluster < 0 for s in instance.servers) or any(
        r.vnf < 0 for r in instance.requests
    ):
        raise InstanceError(
            "instance has unresolved references and cannot be serialized; "
            "see validate() for the defect list"
        )


def _prob_text(a: float) -> str:
    return f"{a:.17g}"


def _quantity_text(x: float) -> str:
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def _emit_array(key: str, entries: list[dict[str, Any]], emit_one) -> str:
    if not entries:
        return f'  "{key}": []'
    body = ",\n".join("    " + emit_one(e) for e in entries)
    return f'  "{key}": [\n{body}\n  ]'


def _emit_name_only(e: dict[str, Any]) -> str:
    return "{" + f'"name": {json.dumps(e["name"])}' + "}"


def _emit_availability_entity(e: dict[str, Any]) -> str:
    return (
        "{"
        + f'"name": {json.dumps(e["name"])}, '
        + f'"availability": {_prob_text(e["availability"])}'
        + "}"
    )


def _emit_server(e: dict[str, Any]) -> str:
    return (
        "{"
        + f'"name": {json.dumps(e["name"])}, '
        + f'"cluster": {json.dumps(e["cluster"])}, '
        + f'"capacity": {_quantity_text(e["capacity"])}, '
        + f'"availability": {_prob_text(e["availability"])}'
        + "}"
    )


def _emit_access_link(e: dict[str, Any]) -> str:
    return (
        "{"
        + f'"cluster": {json.dumps(e["cluster"])}, '
        + f'"access_point": {json.dumps(e["access_point"])}, '
        + f'"availability": {_prob_text(e["availability"])}'
        + "}"
    )


def _emit_sync_link(e: dict[str, Any]) -> str:
    return (
        "{"
        + f'"cluster_a": {json.dumps(e["cluster_a"])}, '
        + f'"cluster_b": {json.dumps(e["cluster_b"])}, '
        + f'"availability": {_prob_text(e["availability"])}'
        + "}"
    )


def _emit_request(e: dict[str, Any]) -> str:
    aps = ", ".join(json.dumps(p) for p in e["access_points"])
    return (
        "{"
        + f'"name": {json.dumps(e["name"])}, '
        + f'"vnf": {json.dumps(e["vnf"])}, '
        + f'"access_points": [{aps}], '
        + f'"demand": {_quantity_text(e["demand"])}'
        + "}"
    )
