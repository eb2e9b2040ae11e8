// Wire types for the /v1 planning service. Instance and placement
// documents use snake_case keys; API envelopes use camelCase.

export interface ClusterEntry {
  name: string;
  availability: number;
}

export interface ServerEntry {
  name: string;
  cluster: string;
  capacity: number;
  availability: number;
}

export interface VnfTypeEntry {
  name: string;
  availability: number;
}

export interface RequestEntry {
  name: string;
  vnf: string;
  access_points: string[];
  demand: number;
}

export interface InstanceDoc {
  clusters: ClusterEntry[];
  servers: ServerEntry[];
  vnf_types: VnfTypeEntry[];
  access_points: { name: string }[];
  access_links: { cluster: string; access_point: string; availability: number }[];
  sync_links: { cluster_a: string; cluster_b: string; availability: number }[];
  requests: RequestEntry[];
}

export interface ReportDoc {
  algorithm: string;
  objective: number;
  worstRequests: string[];
  perRequest: Record<string, number>;
  splits: number;
  vacuous: boolean;
  runtimeS: number;
}

export interface PlacedInstance {
  server: string;
  vnf: string;
  role: 'master' | 'slave';
  reserved: number;
  master?: string;
}

export interface PlacementExport {
  instances: PlacedInstance[];
  assignments: {
    request: string;
    fragments: { master: string; protection: string[]; fraction: number }[];
  }[];
}

export interface ClusterTerm {
  cluster: string;
  isMasterCluster: boolean;
  servers: string[];
  access: number;
  clusterUp: number;
  sync: number;
  serverSet: number;
  term: number;
}

export interface FragmentDetail {
  master: string;
  protection: string[];
  fraction: number;
  availability: number;
  clusters: ClusterTerm[];
}

export interface AvailabilityEntry {
  request: string;
  availability: number;
  fragments: FragmentDetail[];
}

export interface AvailabilityDoc {
  objective: number;
  vacuous: boolean;
  worstRequests: string[];
  requests: AvailabilityEntry[];
}

export interface SolveBody {
  algorithm: string;
  policy?: string;
  split?: boolean;
  timeLimit?: number;
  maxIterations?: number;
  nodeBudget?: number;
  seed?: number;
}

export type SolvePayload =
  | { feasible: true; report: ReportDoc; placement: PlacementExport }
  | { feasible: false; error: string };

export type Delta =
  | { op: 'scale_capacity'; server: string; factor: number }
  | { op: 'set_availability'; kind: 'server' | 'cluster' | 'vnf'; name: string; value: number }
  | { op: 'add_request'; request: RequestEntry }
  | { op: 'remove_request'; request: string };

export interface WhatIfSide {
  objective: number;
  perRequest: Record<string, number>;
  worstRequests: string[];
}

export type WhatIfResult =
  | {
      feasible: true;
      old: WhatIfSide;
      new: WhatIfSide;
      worstDiff: { entered: string[]; left: string[] };
      committed: boolean;
      report: ReportDoc;
      placement: PlacementExport;
    }
  | { feasible: false; error: string; old: WhatIfSide; committed: false };

export interface HistoryEvent {
  delta: Delta[];
  timestamp: number;
}

export interface SessionSnapshot {
  id: string;
  instance: InstanceDoc;
  solved: boolean;
  report: ReportDoc | null;
  solveParams: Record<string, unknown> | null;
  history: HistoryEvent[];
  busy: boolean;
}
