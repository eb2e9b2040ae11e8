/**
 * DOM builders. Numeric text always goes through format.raw so the page
 * shows exactly the digits the service sent.
 */

import { nines, percent, raw } from './format';
import type { WhatIfResult } from './types';
import type {
  AvailabilityRow,
  ClusterView,
  DiffRow,
  ProtectionEdge,
} from './viewmodel';
import { buildDiffRows } from './viewmodel';

type Child = Node | string | null | undefined;

export function el(
  tag: string,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'text') node.textContent = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}

// --- topology ----------------------------------------------------------

export function renderTopology(clusters: ClusterView[], edges: ProtectionEdge[]): HTMLElement {
  const root = el('div', { class: 'topology' });
  for (const cluster of clusters) {
    const group = el(
      'section',
      { class: 'cluster', 'data-cluster': cluster.name },
      el(
        'header',
        {},
        el('span', { class: 'cluster-name', text: cluster.name }),
        el('span', { class: 'cluster-avail', text: nines(cluster.availability) }),
      ),
    );
    const row = el('div', { class: 'server-row' });
    for (const server of cluster.servers) {
      const bar = el('div', { class: 'capacity-bar' });
      const free = el('div', { class: 'capacity-free' });
      free.style.height = `${Math.round(server.freeShare * 100)}%`;
      free.title = `${raw(server.capacity - server.reserved)} of ${raw(server.capacity)} free`;
      bar.append(free);
      const chips = el('div', { class: 'chips' });
      for (const placed of server.instances) {
        chips.append(
          el('span', {
            class: `chip ${placed.role}`,
            'data-server': placed.server,
            'data-vnf': placed.vnf,
            title:
              placed.role === 'master'
                ? `${placed.vnf} master, reserves ${raw(placed.reserved)}`
                : `${placed.vnf} slave of ${placed.master}, reserves ${raw(placed.reserved)}`,
            text: `${placed.vnf} ${placed.role === 'master' ? 'M' : 'S'}`,
          }),
        );
      }
      row.append(
        el(
          'div',
          { class: 'server', 'data-server': server.name },
          bar,
          el('span', { class: 'server-name', text: server.name }),
          el('span', {
            class: 'server-load',
            text: `${percent(1 - server.freeShare)} used`,
          }),
          chips,
        ),
      );
    }
    group.append(row);
    root.append(group);
  }
  if (edges.length > 0) {
    const legend = el('ul', { class: 'protection-list' });
    for (const edge of edges) {
      legend.append(
        el('li', {
          'data-master': edge.master,
          'data-slave': edge.slave,
          text: `${edge.vnf}: ${edge.master} → ${edge.slave}`,
        }),
      );
    }
    root.append(el('div', { class: 'protection' }, el('h3', { text: 'protection' }), legend));
  }
  return root;
}

/**
 * Draw master -> slave arrows as SVG lines over the rendered topology.
 * Needs real layout, so it no-ops when rects come back empty (jsdom).
 */
export function drawEdges(container: HTMLElement, edges: ProtectionEdge[]): void {
  const old = container.querySelector('svg.edges');
  if (old) old.remove();
  const origin = container.getBoundingClientRect();
  if (origin.width === 0 && origin.height === 0) return;
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg');
  svg.setAttribute('class', 'edges');
  svg.setAttribute('width', String(container.scrollWidth));
  svg.setAttribute('height', String(container.scrollHeight));
  const center = (name: string) => {
    const node = container.querySelector(`.server[data-server="${name}"]`);
    if (!node) return null;
    const rect = node.getBoundingClientRect();
    return {
      x: rect.left - origin.left + rect.width / 2,
      y: rect.top - origin.top + rect.height / 2,
    };
  };
  for (const edge of edges) {
    const from = center(edge.master);
    const to = center(edge.slave);
    if (!from || !to) continue;
    const line = document.createElementNS('http://www.w3.org/2000/svg', 'line');
    line.setAttribute('x1', String(from.x));
    line.setAttribute('y1', String(from.y));
    line.setAttribute('x2', String(to.x));
    line.setAttribute('y2', String(to.y));
    line.setAttribute('class', 'edge');
    svg.append(line);
  }
  container.append(svg);
}

// --- availability table -------------------------------------------------

export function renderAvailabilityTable(rows: AvailabilityRow[]): HTMLElement {
  const table = el('table', { class: 'availability' });
  table.append(
    el(
      'thead',
      {},
      el(
        'tr',
        {},
        el('th', { text: 'request' }),
        el('th', { text: 'availability' }),
        el('th', { text: 'nines' }),
        el('th', { text: 'fragments' }),
      ),
    ),
  );
  const body = el('tbody');
  for (const row of rows) {
    const fragments = row.fragments
      .map((f) => `${f.master} (${percent(f.fraction)})`)
      .join(', ');
    body.append(
      el(
        'tr',
        { class: row.worst ? 'worst' : '', 'data-request': row.request },
        el('td', { text: row.request }),
        el('td', { class: 'num avail-value', text: raw(row.availability) }),
        el('td', { text: nines(row.availability) }),
        el('td', { text: fragments }),
      ),
    );
  }
  table.append(body);
  return table;
}

// --- what-if diff -------------------------------------------------------

export function renderWhatIf(result: WhatIfResult): HTMLElement {
  const root = el('div', { class: 'whatif-result' });
  if (!result.feasible) {
    root.append(
      el('p', {
        class: 'warn',
        text: 'the change makes the instance infeasible; nothing to compare',
      }),
    );
    return root;
  }
  const before = result.old;
  const after = result.new;
  root.append(
    el(
      'p',
      { class: 'whatif-headline' },
      'minimum availability ',
      el('span', { class: 'num before', text: raw(before.objective) }),
      ' → ',
      el('span', { class: 'num after avail-value', text: raw(after.objective) }),
      ` (${after.objective > before.objective ? 'up' : after.objective < before.objective ? 'down' : 'unchanged'})`,
    ),
  );
  const rows: DiffRow[] = buildDiffRows(before.perRequest, after.perRequest);
  const table = el('table', { class: 'diff' });
  table.append(
    el(
      'thead',
      {},
      el(
        'tr',
        {},
        el('th', { text: 'request' }),
        el('th', { text: 'before' }),
        el('th', { text: 'after' }),
      ),
    ),
  );
  const body = el('tbody');
  for (const row of rows) {
    body.append(
      el(
        'tr',
        { class: `diff-${row.direction}`, 'data-request': row.request },
        el('td', { text: row.request }),
        el('td', { class: 'num', text: row.before === null ? '—' : raw(row.before) }),
        el('td', {
          class: 'num avail-after',
          text: row.after === null ? '—' : raw(row.after),
        }),
      ),
    );
  }
  table.append(body);
  root.append(table);
  return root;
}
