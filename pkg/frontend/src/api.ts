import type {
  AvailabilityDoc,
  Delta,
  InstanceDoc,
  PlacementExport,
  SessionSnapshot,
  SolveBody,
  SolvePayload,
  WhatIfResult,
} from './types';

export class ApiError extends Error {
  status: number;
  detail: string[];

  constructor(status: number, detail: string[]) {
    super(detail.join('; ') || `HTTP ${status}`);
    this.status = status;
    this.detail = detail;
  }
}

export type SolveStart =
  | { kind: 'done'; payload: SolvePayload }
  | { kind: 'job'; url: string };

async function parseError(res: Response): Promise<ApiError> {
  let detail: string[] = [];
  try {
    const body = await res.json();
    if (Array.isArray(body.detail)) detail = body.detail.map(String);
    else if (body.detail !== undefined) detail = [String(body.detail)];
  } catch {
    detail = [res.statusText];
  }
  return new ApiError(res.status, detail);
}

export function makeClient(base = '', fetchFn: typeof fetch = fetch) {
  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetchFn(`${base}${path}`, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    if (!res.ok) throw await parseError(res);
    return res.json() as Promise<T>;
  }

  return {
    async createSession(doc: InstanceDoc): Promise<{ id: string; violations: string[] }> {
      return request('/v1/sessions', { method: 'POST', body: JSON.stringify(doc) });
    },

    async getSession(sid: string): Promise<SessionSnapshot> {
      return request(`/v1/sessions/${sid}`);
    },

    /** Start a solve; short ones come back done, long ones as a poll URL. */
    async startSolve(sid: string, body: SolveBody): Promise<SolveStart> {
      const res = await fetchFn(`${base}/v1/sessions/${sid}/solve`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      });
      if (res.status === 202) {
        const { job } = await res.json();
        return { kind: 'job', url: job };
      }
      if (!res.ok) throw await parseError(res);
      return { kind: 'done', payload: await res.json() };
    },

    /** Poll a solve job until it leaves the running state. */
    async pollSolve(
      jobUrl: string,
      intervalMs = 500,
      onTick?: () => void,
    ): Promise<SolvePayload> {
      while (true) {
        const res = await fetchFn(`${base}${jobUrl}`);
        if (res.status === 202) {
          onTick?.();
          await new Promise((resolve) => setTimeout(resolve, intervalMs));
          continue;
        }
        if (!res.ok) throw await parseError(res);
        return res.json() as Promise<SolvePayload>;
      }
    },

    async getPlacement(sid: string): Promise<PlacementExport> {
      return request(`/v1/sessions/${sid}/placement`);
    },

    async getAvailability(sid: string): Promise<AvailabilityDoc> {
      return request(`/v1/sessions/${sid}/availability`);
    },

    async whatIf(
      sid: string,
      delta: Delta | Delta[],
      commit = false,
      timeLimit?: number,
    ): Promise<WhatIfResult> {
      return request(`/v1/sessions/${sid}/whatif`, {
        method: 'POST',
        body: JSON.stringify({ delta, commit, timeLimit }),
      });
    },
  };
}

export type Client = ReturnType<typeof makeClient>;
