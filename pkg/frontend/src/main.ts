/**
 * App shell. Routes on the URL hash so a session view survives reload:
 * "#/s/{sid}" rebuilds everything from GET /v1/sessions/{sid} plus the
 * placement and availability endpoints. All view state is a function of
 * what the service returns plus whatever is typed into the forms.
 */

import { ApiError, makeClient, type Client } from './api';
import { nines, raw, seconds } from './format';
import {
  drawEdges,
  el,
  renderAvailabilityTable,
  renderTopology,
  renderWhatIf,
} from './render';
import { SAMPLE_INSTANCE } from './sample';
import type {
  AvailabilityDoc,
  PlacementExport,
  SessionSnapshot,
  SolveBody,
  WhatIfResult,
} from './types';
import {
  buildAvailabilityRows,
  buildTopology,
  checkDeltaForm,
  protectionEdges,
  type DeltaFormInput,
} from './viewmodel';

const api = makeClient('');

function errorText(err: unknown): string {
  if (err instanceof ApiError) return err.detail.join('; ') || `HTTP ${err.status}`;
  return err instanceof Error ? err.message : String(err);
}

// --- session view (pure DOM assembly, reused by reload) ----------------

export interface SessionArtifacts {
  snapshot: SessionSnapshot;
  placement: PlacementExport | null;
  availability: AvailabilityDoc | null;
}

export function sessionDom(
  arts: SessionArtifacts,
  lastWhatIf: WhatIfResult | null = null,
): HTMLElement {
  const { snapshot, placement, availability } = arts;
  const root = el('div', { class: 'session' });

  const head = el(
    'header',
    { class: 'session-head' },
    el('h1', { text: `session ${snapshot.id}` }),
    snapshot.busy ? el('span', { class: 'badge busy', text: 'solving' }) : null,
  );
  root.append(head);

  const topo = renderTopology(buildTopology(snapshot.instance, placement), protectionEdges(placement));
  root.append(el('section', { class: 'panel' }, el('h2', { text: 'topology' }), topo));

  if (snapshot.report) {
    const r = snapshot.report;
    root.append(
      el(
        'section',
        { class: 'panel report' },
        el('h2', { text: 'latest solve' }),
        el(
          'dl',
          {},
          el('dt', { text: 'algorithm' }),
          el('dd', { text: r.algorithm }),
          el('dt', { text: 'minimum availability' }),
          el('dd', { class: 'num objective avail-value', text: raw(r.objective) }),
          el('dt', { text: 'nines' }),
          el('dd', { text: nines(r.objective) }),
          el('dt', { text: 'splits' }),
          el('dd', { text: String(r.splits) }),
          el('dt', { text: 'runtime' }),
          el('dd', { text: seconds(r.runtimeS) }),
          el('dt', { text: 'worst requests' }),
          el('dd', { text: r.worstRequests.join(', ') || 'none' }),
        ),
      ),
    );
  }

  if (availability) {
    root.append(
      el(
        'section',
        { class: 'panel' },
        el('h2', { text: 'per-request availability' }),
        renderAvailabilityTable(buildAvailabilityRows(availability)),
      ),
    );
  }

  if (lastWhatIf) {
    root.append(
      el('section', { class: 'panel' }, el('h2', { text: 'what-if' }), renderWhatIf(lastWhatIf)),
    );
  }

  if (snapshot.history.length > 0) {
    const list = el('ol', { class: 'history' });
    for (const event of snapshot.history) {
      const ops = event.delta.map((d) => d.op).join(', ');
      list.append(
        el('li', {
          text: `${new Date(event.timestamp * 1000).toISOString()} — ${ops}`,
        }),
      );
    }
    root.append(el('section', { class: 'panel' }, el('h2', { text: 'committed changes' }), list));
  }

  return root;
}

// --- interactive shell ---------------------------------------------------

const app = () => document.getElementById('app') as HTMLElement;

function banner(kind: 'error' | 'info', text: string): void {
  const existing = document.querySelector('.banner');
  if (existing) existing.remove();
  if (!text) return;
  app().prepend(el('div', { class: `banner ${kind}`, text }));
}

async function fetchArtifacts(sid: string): Promise<SessionArtifacts> {
  const snapshot = await api.getSession(sid);
  if (!snapshot.solved) return { snapshot, placement: null, availability: null };
  const [placement, availability] = await Promise.all([
    api.getPlacement(sid),
    api.getAvailability(sid),
  ]);
  return { snapshot, placement, availability };
}

function startView(): HTMLElement {
  const root = el('div', { class: 'start' });
  root.append(el('h1', { text: 'availability planner' }));
  root.append(
    el('p', {
      class: 'muted',
      text: 'paste an instance document or load the sample, then create a planning session',
    }),
  );
  const input = el('textarea', { id: 'doc-input', rows: '18', spellcheck: 'false' }) as HTMLTextAreaElement;
  const loadBtn = el('button', { id: 'load-sample', text: 'load sample instance' });
  const createBtn = el('button', { id: 'create-session', class: 'primary', text: 'create session' });
  const note = el('p', { class: 'inline-error', id: 'start-error' });

  loadBtn.addEventListener('click', () => {
    input.value = JSON.stringify(SAMPLE_INSTANCE, null, 2);
    note.textContent = '';
  });
  createBtn.addEventListener('click', async () => {
    note.textContent = '';
    let doc: unknown;
    try {
      doc = JSON.parse(input.value);
    } catch (err) {
      note.textContent = `not valid JSON: ${errorText(err)}`;
      return;
    }
    try {
      createBtn.setAttribute('disabled', '');
      const { id, violations } = await api.createSession(doc as never);
      sessionStorage.setItem(`violations:${id}`, JSON.stringify(violations));
      location.hash = `#/s/${id}`;
    } catch (err) {
      note.textContent = errorText(err);
    } finally {
      createBtn.removeAttribute('disabled');
    }
  });

  root.append(el('div', { class: 'start-actions' }, loadBtn, createBtn), input, note);
  return root;
}

function solveForm(sid: string): HTMLElement {
  const form = el('form', { class: 'solve-form' });
  const algo = el('select', { id: 'algo' }) as HTMLSelectElement;
  for (const name of ['greedy', 'vns', 'exact']) {
    algo.append(el('option', { value: name, text: name }));
  }
  algo.value = 'vns';
  const policy = el('select', { id: 'policy' }) as HTMLSelectElement;
  for (const name of ['bestfit', 'firstfit', 'bestavail']) {
    policy.append(el('option', { value: name, text: name }));
  }
  const policyWrap = el('label', { class: 'hidden' }, 'policy ', policy);
  algo.addEventListener('change', () => {
    policyWrap.classList.toggle('hidden', algo.value !== 'greedy');
  });
  const budget = el('input', {
    id: 'time-limit',
    type: 'number',
    step: '0.1',
    min: '0.1',
    placeholder: 'seconds',
  }) as HTMLInputElement;
  const split = el('input', { id: 'split', type: 'checkbox' }) as HTMLInputElement;
  const submit = el('button', { class: 'primary', text: 'solve' });
  const progress = el('span', { class: 'progress', id: 'solve-progress' });

  form.append(
    el('label', {}, 'algorithm ', algo),
    policyWrap,
    el('label', {}, 'time limit ', budget),
    el('label', {}, 'allow splits ', split),
    submit,
    progress,
  );

  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    banner('error', '');
    const body: SolveBody = { algorithm: algo.value };
    if (algo.value === 'greedy') body.policy = policy.value;
    if (split.checked) body.split = true;
    if (budget.value) {
      const limit = Number(budget.value);
      if (!Number.isFinite(limit) || limit <= 0) {
        progress.textContent = 'time limit must be positive';
        return;
      }
      body.timeLimit = limit;
    }
    submit.setAttribute('disabled', '');
    progress.textContent = 'solving...';
    try {
      const started = await api.startSolve(sid, body);
      let payload = started.kind === 'done' ? started.payload : null;
      if (started.kind === 'job') {
        let ticks = 0;
        payload = await api.pollSolve(started.url, 500, () => {
          ticks += 1;
          progress.textContent = `solving... ${(ticks * 0.5).toFixed(1)}s`;
        });
      }
      if (payload && !payload.feasible) {
        banner('error', `no feasible placement: ${payload.error}`);
      }
      await route();
    } catch (err) {
      banner('error', errorText(err));
      submit.removeAttribute('disabled');
      progress.textContent = '';
    }
  });
  return el('section', { class: 'panel' }, el('h2', { text: 'solve' }), form);
}

export function whatIfForm(sid: string, client: Client = api): HTMLElement {
  const form = el('form', { class: 'whatif-form' });
  const op = el('select', { id: 'wi-op' }) as HTMLSelectElement;
  for (const name of ['scale_capacity', 'set_availability', 'add_request', 'remove_request']) {
    op.append(el('option', { value: name, text: name.replace('_', ' ') }));
  }
  const fields = el('div', { class: 'wi-fields' });
  const error = el('p', { class: 'inline-error', id: 'wi-error' });
  const result = el('div', { id: 'wi-result' });

  const field = (id: string, label: string, attrs: Record<string, string> = {}) =>
    el('label', {}, `${label} `, el('input', { id, ...attrs }));

  function rebuildFields(): void {
    fields.replaceChildren();
    error.textContent = '';
    switch (op.value) {
      case 'scale_capacity':
        fields.append(
          field('wi-server', 'server (* for all)', { value: '*' }),
          field('wi-factor', 'factor', { type: 'number', step: '0.1' }),
        );
        break;
      case 'set_availability': {
        const kind = el('select', { id: 'wi-kind' }) as HTMLSelectElement;
        for (const name of ['server', 'cluster', 'vnf']) {
          kind.append(el('option', { value: name, text: name }));
        }
        fields.append(
          el('label', {}, 'kind ', kind),
          field('wi-name', 'name (* for all)', { value: '*' }),
          field('wi-value', 'availability', { type: 'number', step: '0.0001' }),
        );
        break;
      }
      case 'add_request':
        fields.append(
          field('wi-req', 'name'),
          field('wi-vnf', 'vnf type'),
          field('wi-aps', 'access points (comma separated)'),
          field('wi-demand', 'demand', { type: 'number', step: '1' }),
        );
        break;
      case 'remove_request':
        fields.append(field('wi-req', 'request name'));
        break;
    }
  }
  op.addEventListener('change', rebuildFields);
  rebuildFields();

  const read = (id: string) => (document.getElementById(id) as HTMLInputElement | null)?.value;

  function collect(): DeltaFormInput {
    return {
      op: op.value,
      server: read('wi-server'),
      factor: read('wi-factor'),
      kind: read('wi-kind'),
      name: read('wi-name'),
      value: read('wi-value'),
      requestName: read('wi-req'),
      vnf: read('wi-vnf'),
      accessPoints: read('wi-aps'),
      demand: read('wi-demand'),
    };
  }

  async function run(commit: boolean): Promise<void> {
    error.textContent = '';
    const checked = checkDeltaForm(collect());
    if (!checked.ok) {
      // invalid input stops here; nothing is sent to the service
      error.textContent = checked.error;
      return;
    }
    try {
      const outcome = await client.whatIf(sid, checked.delta, commit);
      if (commit && outcome.feasible) {
        await route(outcome);
        return;
      }
      result.replaceChildren(renderWhatIf(outcome));
    } catch (err) {
      error.textContent = errorText(err);
    }
  }

  const probeBtn = el('button', { type: 'button', id: 'wi-probe', text: 'probe' });
  const commitBtn = el('button', { type: 'button', id: 'wi-commit', class: 'primary', text: 'commit' });
  probeBtn.addEventListener('click', () => void run(false));
  commitBtn.addEventListener('click', () => void run(true));

  form.append(el('label', {}, 'change ', op), fields, el('div', { class: 'wi-actions' }, probeBtn, commitBtn), error);
  return el('section', { class: 'panel' }, el('h2', { text: 'what if' }), form, result);
}

// --- routing -------------------------------------------------------------

async function route(lastWhatIf: WhatIfResult | null = null): Promise<void> {
  const match = /^#\/s\/([0-9a-f]+)$/.exec(location.hash);
  const mount = app();
  if (!match) {
    mount.replaceChildren(startView());
    return;
  }
  const sid = match[1];
  mount.replaceChildren(el('p', { class: 'muted', text: 'loading session...' }));
  try {
    const arts = await fetchArtifacts(sid);
    const view = sessionDom(arts, lastWhatIf);
    view.append(solveForm(sid));
    if (arts.snapshot.solved) view.append(whatIfForm(sid));
    mount.replaceChildren(view);
    const stored = sessionStorage.getItem(`violations:${sid}`);
    const violations: string[] = stored ? JSON.parse(stored) : [];
    if (violations.length > 0) {
      banner('info', violations.join('; '));
    }
    const topo = mount.querySelector<HTMLElement>('.topology');
    if (topo) drawEdges(topo, protectionEdges(arts.placement));
  } catch (err) {
    mount.replaceChildren(
      el('div', { class: 'start' }, el('p', { class: 'inline-error', text: errorText(err) })),
    );
  }
}

if (typeof window !== 'undefined' && document.getElementById('app')) {
  window.addEventListener('hashchange', () => void route());
  void route();
}
