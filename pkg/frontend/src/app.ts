/** DOM wiring for the operator console. Long-polls the approval queue
 * (2 s server-side wait), renders incidents and pending approvals, and
 * submits approve/reject decisions with the operator's id. */

import { ApiError, ConsoleClient } from './client.js';
import {
  DecisionForm,
  buildIncidentRows,
  buildQueueRows,
  submitGuarded,
} from './viewmodel.js';
import type { Decision } from './types.js';

const POLL_WAIT_MS = 2000;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

export function startConsole(baseUrl: string): void {
  const client = new ConsoleClient(baseUrl);
  const banner = el('banner');
  const queueEl = el('queue');
  const incidentsEl = el('incidents');
  const detailEl = el('detail');
  const operatorInput = el('operator') as HTMLInputElement;
  const forms = new Map<string, DecisionForm>();

  function setBanner(message: string | null): void {
    banner.textContent = message ?? '';
    banner.style.display = message ? 'block' : 'none';
  }

  async function decide(approvalId: string, decision: Decision): Promise<void> {
    const operatorId = operatorInput.value.trim() || 'console-operator';
    let form = forms.get(approvalId);
    if (!form) {
      form = new DecisionForm();
      forms.set(approvalId, form);
    }
    const outcome = await submitGuarded(
      form,
      () => client.submitDecision(approvalId, decision, operatorId),
      decision,
    );
    if (outcome.errorCode && outcome.errorCode !== 'ALREADY_DECIDED') {
      setBanner(`decision failed: ${outcome.errorCode}`);
    }
    await refreshIncidents();
  }

  function renderQueue(rows: ReturnType<typeof buildQueueRows>): void {
    queueEl.replaceChildren();
    if (rows.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty';
      empty.textContent = 'No pending approvals.';
      queueEl.appendChild(empty);
      return;
    }
    for (const row of rows) {
      const card = document.createElement('div');
      card.className = 'approval';
      const head = document.createElement('h3');
      head.textContent = `${row.approvalId} — incident ${row.incidentId} (config v${row.baseVersion})`;
      card.appendChild(head);
      const pre = document.createElement('pre');
      pre.textContent = row.summaryLines.join('\n');
      card.appendChild(pre);
      const form = forms.get(row.approvalId) ?? new DecisionForm();
      forms.set(row.approvalId, form);
      for (const decision of ['approve', 'reject'] as Decision[]) {
        const button = document.createElement('button');
        button.textContent = decision;
        button.disabled = !form.canSubmit;
        button.addEventListener('click', () => {
          button.disabled = true;
          void decide(row.approvalId, decision);
        });
        card.appendChild(button);
      }
      queueEl.appendChild(card);
    }
  }

  async function refreshIncidents(): Promise<void> {
    const rows = buildIncidentRows(await client.listIncidents());
    incidentsEl.replaceChildren();
    for (const row of rows) {
      const li = document.createElement('li');
      li.textContent = `${row.incidentId} [${row.phase}] risk=${row.risk} ${row.scenarioId}`;
      li.addEventListener('click', () => void showDetail(row.incidentId));
      incidentsEl.appendChild(li);
    }
  }

  async function showDetail(incidentId: string): Promise<void> {
    const detail = await client.getIncident(incidentId);
    detailEl.textContent = JSON.stringify(detail, null, 2);
  }

  async function pollLoop(): Promise<void> {
    for (;;) {
      try {
        const approvals = await client.listPendingApprovals(POLL_WAIT_MS);
        setBanner(null);
        renderQueue(buildQueueRows(approvals));
        await refreshIncidents();
      } catch (err) {
        const label =
          err instanceof ApiError ? err.code : 'service unreachable';
        setBanner(`connection problem: ${label}`);
        await new Promise((resolve) => setTimeout(resolve, POLL_WAIT_MS));
      }
    }
  }

  void pollLoop();
}
