/**
 * Pure view-model builders. Everything here derives from service
 * responses alone; no availability math happens client-side, so every
 * number the view shows is a number the service reported.
 */

import type {
  AvailabilityDoc,
  AvailabilityEntry,
  Delta,
  InstanceDoc,
  PlacedInstance,
  PlacementExport,
} from './types';

export interface ServerView {
  name: string;
  capacity: number;
  availability: number;
  reserved: number;
  freeShare: number;
  instances: PlacedInstance[];
}

export interface ClusterView {
  name: string;
  availability: number;
  servers: ServerView[];
}

export interface ProtectionEdge {
  vnf: string;
  master: string;
  slave: string;
}

export function buildTopology(
  instance: InstanceDoc,
  placement: PlacementExport | null,
): ClusterView[] {
  const byServer = new Map<string, PlacedInstance[]>();
  for (const placed of placement?.instances ?? []) {
    const list = byServer.get(placed.server) ?? [];
    list.push(placed);
    byServer.set(placed.server, list);
  }
  return instance.clusters.map((cluster) => ({
    name: cluster.name,
    availability: cluster.availability,
    servers: instance.servers
      .filter((server) => server.cluster === cluster.name)
      .map((server) => {
        const instances = byServer.get(server.name) ?? [];
        const reserved = instances.reduce((total, inst) => total + inst.reserved, 0);
        return {
          name: server.name,
          capacity: server.capacity,
          availability: server.availability,
          reserved,
          freeShare: server.capacity > 0 ? Math.max(0, 1 - reserved / server.capacity) : 0,
          instances,
        };
      }),
  }));
}

export function protectionEdges(placement: PlacementExport | null): ProtectionEdge[] {
  if (!placement) return [];
  return placement.instances
    .filter((placed) => placed.role === 'slave' && placed.master)
    .map((placed) => ({ vnf: placed.vnf, master: placed.master as string, slave: placed.server }));
}

export interface AvailabilityRow {
  request: string;
  availability: number;
  worst: boolean;
  fragments: AvailabilityEntry['fragments'];
}

/** Rows sorted ascending so the worst requests lead the table. */
export function buildAvailabilityRows(doc: AvailabilityDoc): AvailabilityRow[] {
  const worst = new Set(doc.worstRequests);
  return [...doc.requests]
    .sort((a, b) => a.availability - b.availability || a.request.localeCompare(b.request))
    .map((entry) => ({
      request: entry.request,
      availability: entry.availability,
      worst: worst.has(entry.request),
      fragments: entry.fragments,
    }));
}

export interface DiffRow {
  request: string;
  before: number | null;
  after: number | null;
  direction: 'up' | 'down' | 'flat';
}

export function buildDiffRows(
  before: Record<string, number>,
  after: Record<string, number>,
): DiffRow[] {
  const names = new Set([...Object.keys(before), ...Object.keys(after)]);
  return [...names].sort().map((request) => {
    const a = request in before ? before[request] : null;
    const b = request in after ? after[request] : null;
    let direction: DiffRow['direction'] = 'flat';
    if (a !== null && b !== null && b > a) direction = 'up';
    else if (a !== null && b !== null && b < a) direction = 'down';
    else if (a === null) direction = 'up';
    else if (b === null) direction = 'down';
    return { request, before: a, after: b, direction };
  });
}

// --- what-if form validation (client side, mirrors service rules) ------

export interface DeltaFormInput {
  op: string;
  server?: string;
  factor?: string;
  kind?: string;
  name?: string;
  value?: string;
  requestName?: string;
  vnf?: string;
  accessPoints?: string;
  demand?: string;
}

export type DeltaCheck = { ok: true; delta: Delta } | { ok: false; error: string };

export function checkDeltaForm(input: DeltaFormInput): DeltaCheck {
  switch (input.op) {
    case 'scale_capacity': {
      const factor = Number(input.factor);
      if (!input.factor || !Number.isFinite(factor) || factor <= 0) {
        return { ok: false, error: 'capacity factor must be a positive number' };
      }
      return { ok: true, delta: { op: 'scale_capacity', server: input.server || '*', factor } };
    }
    case 'set_availability': {
      const kind = input.kind;
      if (kind !== 'server' && kind !== 'cluster' && kind !== 'vnf') {
        return { ok: false, error: 'pick what kind of component to change' };
      }
      const value = Number(input.value);
      if (!input.value || !Number.isFinite(value) || value <= 0 || value > 1) {
        return { ok: false, error: 'availability must be in (0, 1]' };
      }
      return { ok: true, delta: { op: 'set_availability', kind, name: input.name || '*', value } };
    }
    case 'add_request': {
      const name = (input.requestName || '').trim();
      const vnf = (input.vnf || '').trim();
      const points = (input.accessPoints || '')
        .split(',')
        .map((p) => p.trim())
        .filter(Boolean);
      const demand = Number(input.demand);
      if (!name) return { ok: false, error: 'request needs a name' };
      if (!vnf) return { ok: false, error: 'request needs a vnf type' };
      if (points.length === 0) return { ok: false, error: 'list at least one access point' };
      if (!Number.isFinite(demand) || demand <= 0) {
        return { ok: false, error: 'demand must be a positive number' };
      }
      return {
        ok: true,
        delta: { op: 'add_request', request: { name, vnf, access_points: points, demand } },
      };
    }
    case 'remove_request': {
      const name = (input.requestName || '').trim();
      if (!name) return { ok: false, error: 'name the request to remove' };
      return { ok: true, delta: { op: 'remove_request', request: name } };
    }
    default:
      return { ok: false, error: `unknown operation ${input.op}` };
  }
}
