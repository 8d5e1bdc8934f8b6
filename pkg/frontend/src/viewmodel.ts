/** Pure view-model mapping: server responses in, render-ready rows out.
 * Invariant: every rendered value is copied from a service response —
 * the console never recomputes diffs or verdicts. */

import type {
  ApprovalRequest,
  Decision,
  IncidentDetail,
  IncidentSummary,
} from './types.js';

export interface QueueRow {
  approvalId: string;
  incidentId: string;
  baseVersion: number;
  /** rendered_summary lines, verbatim from the service. */
  summaryLines: string[];
}

export interface DiffRow {
  path: string;
  op: string;
  value: unknown;
}

export interface IncidentRow {
  incidentId: string;
  phase: string;
  scenarioId: string;
  risk: string;
  terminal: boolean;
}

const TERMINAL_PHASES = new Set([
  'mitigated',
  'closed_benign',
  'escalated',
  'failed',
]);

export function buildQueueRows(approvals: ApprovalRequest[]): QueueRow[] {
  return approvals
    .filter((a) => a.status === 'pending')
    .map((a) => ({
      approvalId: a.approval_id,
      incidentId: a.incident_id,
      baseVersion: a.diff.base_version,
      summaryLines: a.rendered_summary.split('\n').filter((l) => l.length > 0),
    }));
}

export function buildDiffRows(approval: ApprovalRequest): DiffRow[] {
  return approval.diff.changes.map((c) => ({
    path: c.path,
    op: c.op,
    value: c.value,
  }));
}

export function buildIncidentRows(incidents: IncidentSummary[]): IncidentRow[] {
  return incidents.map((i) => ({
    incidentId: i.incident_id,
    phase: i.phase,
    scenarioId: i.scenario_id,
    risk: i.risk ?? 'unknown',
    terminal: TERMINAL_PHASES.has(i.phase),
  }));
}

export interface IncidentDetailView {
  incidentId: string;
  phase: string;
  verdict: string | null;
  eventSummary: string | null;
  selectedTechniques: { techniqueId: string; score: number | null }[];
  planSteps: string[];
  guidance: string[];
  escalationReason: string | null;
}

export function buildIncidentDetail(detail: IncidentDetail): IncidentDetailView {
  const scores = new Map(
    (detail.classification?.candidates ?? []).map((c) => [
      c.technique_id,
      c.score,
    ]),
  );
  return {
    incidentId: detail.incident_id,
    phase: detail.phase,
    verdict: detail.report?.verdict ?? null,
    eventSummary: detail.report?.event_summary ?? null,
    selectedTechniques: (detail.classification?.selected_technique_ids ?? []).map(
      (id) => ({ techniqueId: id, score: scores.get(id) ?? null }),
    ),
    planSteps: (detail.plan?.steps ?? []).map((s) => s.tool_name),
    guidance: detail.recommendation?.guidance ?? [],
    escalationReason: detail.escalation_reason,
  };
}

/** Decision-form state machine: the buttons disable on first click and
 * stay disabled until the server responds, so a double-click can emit at
 * most one POST. The server's exactly-once rule is the backstop. */
export class DecisionForm {
  private inFlight = false;
  private decided = false;

  get canSubmit(): boolean {
    return !this.inFlight && !this.decided;
  }

  /** Returns true exactly once per approval; later calls are no-ops. */
  begin(): boolean {
    if (!this.canSubmit) return false;
    this.inFlight = true;
    return true;
  }

  /** Server responded: settled=true on success or ALREADY_DECIDED (the
   * server state is authoritative either way); false re-enables the form
   * after a transient failure. */
  finish(settled: boolean): void {
    this.inFlight = false;
    this.decided = settled;
  }
}

export interface DecisionOutcome {
  submitted: boolean;
  status: string | null;
  errorCode: string | null;
}

/** Drive one decision through a form guard and the client. Shared by the
 * app and the tests so the double-click guard is what actually ships. */
export async function submitGuarded(
  form: DecisionForm,
  post: () => Promise<{ status: string }>,
  decision: Decision,
): Promise<DecisionOutcome> {
  void decision;
  if (!form.begin()) {
    return { submitted: false, status: null, errorCode: null };
  }
  try {
    const result = await post();
    form.finish(true);
    return { submitted: true, status: result.status, errorCode: null };
  } catch (err) {
    const code =
      err && typeof err === 'object' && 'code' in err
        ? String((err as { code: unknown }).code)
        : 'INTERNAL';
    // ALREADY_DECIDED means another operator (or the CLI) won the race;
    // the server state is authoritative, so the form stays settled.
    form.finish(code === 'ALREADY_DECIDED');
    return { submitted: true, status: null, errorCode: code };
  }
}
