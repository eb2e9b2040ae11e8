import { describe, expect, it, vi } from 'vitest';
import { ApiError, makeClient } from '../src/api';

function reply(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  } as unknown as Response;
}

describe('makeClient', () => {
  it('posts the instance document and returns the new session id', async () => {
    const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe('http://x/v1/sessions');
      expect(init?.method).toBe('POST');
      expect(JSON.parse(init?.body as string)).toEqual({ clusters: [] });
      return reply(201, { id: 'abc123', violations: [] });
    });
    const client = makeClient('http://x', fetchFn as typeof fetch);
    const out = await client.createSession({ clusters: [] } as never);
    expect(out.id).toBe('abc123');
  });

  it('returns a finished solve directly', async () => {
    const payload = { feasible: true, report: {}, placement: {} };
    const fetchFn = vi.fn(async () => reply(200, payload));
    const client = makeClient('', fetchFn as typeof fetch);
    const started = await client.startSolve('abc', { algorithm: 'vns' });
    expect(started).toEqual({ kind: 'done', payload });
  });

  it('turns a 202 into a job handle and polls it to completion', async () => {
    const payload = { feasible: true, report: {}, placement: {} };
    let polls = 0;
    const fetchFn = vi.fn(async (url: RequestInfo | URL) => {
      if (String(url).endsWith('/solve')) {
        return reply(202, { job: '/v1/sessions/abc/jobs/j1' });
      }
      polls += 1;
      return polls < 3 ? reply(202, { state: 'running' }) : reply(200, payload);
    });
    const client = makeClient('', fetchFn as typeof fetch);
    const started = await client.startSolve('abc', { algorithm: 'exact' });
    expect(started.kind).toBe('job');
    if (started.kind !== 'job') return;
    const ticks: number[] = [];
    const done = await client.pollSolve(started.url, 1, () => ticks.push(polls));
    expect(done).toEqual(payload);
    expect(polls).toBe(3);
    expect(ticks).toEqual([1, 2]);
  });

  it('surfaces 422 detail lines verbatim', async () => {
    const fetchFn = vi.fn(async () =>
      reply(422, { detail: ['request r9 names unknown vnf type "nat"', 'second problem'] }),
    );
    const client = makeClient('', fetchFn as typeof fetch);
    const err = await client.createSession({} as never).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.detail).toEqual(['request r9 names unknown vnf type "nat"', 'second problem']);
    expect(err.message).toContain('unknown vnf type');
  });

  it('handles scalar detail and non-JSON error bodies', async () => {
    const scalar = makeClient('', (async () => reply(409, { detail: 'busy' })) as typeof fetch);
    const err1 = await scalar.getSession('abc').catch((e) => e);
    expect(err1.detail).toEqual(['busy']);

    const broken = {
      ok: false,
      status: 500,
      statusText: 'Internal Server Error',
      json: async () => {
        throw new Error('not json');
      },
    } as unknown as Response;
    const plain = makeClient('', (async () => broken) as typeof fetch);
    const err2 = await plain.getSession('abc').catch((e) => e);
    expect(err2.detail).toEqual(['Internal Server Error']);
  });

  it('sends what-if deltas with the commit flag', async () => {
    const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe('/v1/sessions/abc/whatif');
      const body = JSON.parse(init?.body as string);
      expect(body.delta).toEqual({ op: 'scale_capacity', server: '*', factor: 2 });
      expect(body.commit).toBe(true);
      return reply(200, { feasible: true, committed: true });
    });
    const client = makeClient('', fetchFn as typeof fetch);
    const out = await client.whatIf('abc', { op: 'scale_capacity', server: '*', factor: 2 }, true);
    expect(out.committed).toBe(true);
  });
});
