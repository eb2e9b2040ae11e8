/**
 * End-to-end round trip against the real planning service: load the
 * sample instance, solve, commit a capacity-scaling what-if, and check
 * that every availability figure on the page equals the digits in the
 * service's JSON byte-for-byte. Finally rebuild the view from a fresh
 * session fetch, as a page reload would, and require the same DOM.
 *
 * Needs the python package installed (the `havnfp` entry point); the
 * test spawns `havnfp serve` itself on a throwaway port.
 */

import { spawn, type ChildProcess } from 'node:child_process';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { makeClient } from '../src/api';
import { sessionDom, type SessionArtifacts } from '../src/main';
import { SAMPLE_INSTANCE } from '../src/sample';

const PORT = 8923;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let serverLog = '';

async function waitReady(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/v1/sessions/nope`);
      if (res.status === 404) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE}\n${serverLog}`);
}

beforeAll(async () => {
  server = spawn('havnfp', ['serve', '--port', String(PORT)], {
    stdio: ['ignore', 'pipe', 'pipe'],
  });
  server.stdout?.on('data', (chunk) => (serverLog += chunk));
  server.stderr?.on('data', (chunk) => (serverLog += chunk));
  await waitReady();
});

afterAll(async () => {
  if (!server) return;
  server.kill('SIGTERM');
  await new Promise((resolve) => {
    server.once('exit', resolve);
    setTimeout(resolve, 5_000);
  });
});

/** Literal "availability" digit strings per request, straight from the wire. */
async function rawAvailabilityLiterals(sid: string): Promise<Map<string, string>> {
  const res = await fetch(`${BASE}/v1/sessions/${sid}/availability`);
  expect(res.status).toBe(200);
  const text = await res.text();
  const literals = new Map<string, string>();
  const pattern = /\{"request":"([^"]+)","availability":([-0-9.eE+]+)/g;
  for (const match of text.matchAll(pattern)) {
    literals.set(match[1], match[2]);
  }
  return literals;
}

/** Literal objective digits from the stored report in the session body. */
async function rawObjectiveLiteral(sid: string): Promise<string> {
  const res = await fetch(`${BASE}/v1/sessions/${sid}`);
  expect(res.status).toBe(200);
  const match = /"objective":([-0-9.eE+]+)/.exec(await res.text());
  expect(match).not.toBeNull();
  return (match as RegExpExecArray)[1];
}

async function fetchArtifacts(client: ReturnType<typeof makeClient>, sid: string) {
  const snapshot = await client.getSession(sid);
  const [placement, availability] = await Promise.all([
    client.getPlacement(sid),
    client.getAvailability(sid),
  ]);
  return { snapshot, placement, availability } satisfies SessionArtifacts;
}

function displayedAvailabilities(view: HTMLElement): Map<string, string> {
  const out = new Map<string, string>();
  for (const row of view.querySelectorAll('table.availability tbody tr')) {
    const request = row.getAttribute('data-request') as string;
    const cell = row.querySelector('.avail-value') as HTMLElement;
    out.set(request, cell.textContent as string);
  }
  return out;
}

async function expectViewMatchesService(view: HTMLElement, sid: string): Promise<void> {
  const displayed = displayedAvailabilities(view);
  const literals = await rawAvailabilityLiterals(sid);
  expect(displayed.size).toBe(literals.size);
  for (const [request, digits] of literals) {
    expect(displayed.get(request), `displayed availability for ${request}`).toBe(digits);
  }
  const objectiveCell = view.querySelector('.objective') as HTMLElement;
  expect(objectiveCell.textContent).toBe(await rawObjectiveLiteral(sid));
}

describe('sample instance round trip', () => {
  const client = makeClient(BASE);
  let sid = '';

  it('creates a session from the sample instance', async () => {
    const created = await client.createSession(SAMPLE_INSTANCE);
    sid = created.id;
    expect(sid).toMatch(/^[0-9a-f]+$/);
    const errors = created.violations.filter((v) => !v.startsWith('warning:'));
    expect(errors).toEqual([]);
  });

  it('solves it and displays exactly the digits the service reported', async () => {
    const started = await client.startSolve(sid, { algorithm: 'vns', timeLimit: 5 });
    const payload = started.kind === 'done' ? started.payload : await client.pollSolve(started.url, 250);
    expect(payload.feasible).toBe(true);

    const view = sessionDom(await fetchArtifacts(client, sid));
    await expectViewMatchesService(view, sid);

    // topology mirrors the input: three clusters means three groups,
    // and the placement overlay puts master chips on the page with the
    // worst request flagged in the table
    expect(view.querySelectorAll('.cluster').length).toBe(SAMPLE_INSTANCE.clusters.length);
    expect(view.querySelectorAll('.chip.master').length).toBeGreaterThan(0);
    expect(view.querySelectorAll('tr.worst').length).toBeGreaterThan(0);
  });

  it('probing a capacity doubling never lowers the minimum availability', async () => {
    const outcome = await client.whatIf(sid, { op: 'scale_capacity', server: '*', factor: 2 });
    expect(outcome.feasible).toBe(true);
    if (!outcome.feasible) return;
    expect(outcome.committed).toBe(false);
    expect(outcome.new.objective).toBeGreaterThanOrEqual(outcome.old.objective);
    // probe only: the session document must be untouched
    const snapshot = await client.getSession(sid);
    expect(snapshot.history).toHaveLength(0);
  });

  it('commits a capacity-scaling what-if and still matches digit for digit', async () => {
    const outcome = await client.whatIf(
      sid,
      { op: 'scale_capacity', server: '*', factor: 1.5 },
      true,
    );
    expect(outcome.feasible).toBe(true);
    if (!outcome.feasible) return;
    expect(outcome.committed).toBe(true);

    const arts = await fetchArtifacts(client, sid);
    expect(arts.snapshot.history).toHaveLength(1);
    expect(arts.snapshot.history[0].delta[0].op).toBe('scale_capacity');
    // the committed document really has the scaled capacities
    const byName = Object.fromEntries(
      arts.snapshot.instance.servers.map((s) => [s.name, s.capacity]),
    );
    for (const server of SAMPLE_INSTANCE.servers) {
      expect(byName[server.name]).toBeCloseTo(server.capacity * 1.5, 9);
    }

    const view = sessionDom(arts, outcome);
    await expectViewMatchesService(view, sid);

    // the what-if diff panel shows the service's numbers too
    const after = view.querySelector('.whatif-headline .after') as HTMLElement;
    expect(after.textContent).toBe(String(outcome.new.objective));
  });

  it('reproduces the identical view from a fresh session fetch', async () => {
    const first = sessionDom(await fetchArtifacts(client, sid));
    const reloaded = makeClient(BASE); // as a new browser tab would
    const second = sessionDom(await fetchArtifacts(reloaded, sid));
    expect(second.outerHTML).toBe(first.outerHTML);
    await expectViewMatchesService(second, sid);
  });
});
