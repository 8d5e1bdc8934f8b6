/** Wire types mirroring the service's JSON responses (see api_schema.json
 * at the repo root). The console renders these verbatim; it computes no
 * security verdicts or diffs of its own. */

export interface ConfigChange {
  path: string;
  op: string;
  value: unknown;
}

export interface ConfigDiff {
  base_version: number;
  changes: ConfigChange[];
}

export type ApprovalStatus = 'pending' | 'approved' | 'rejected' | 'expired';

export interface ApprovalRequest {
  approval_id: string;
  incident_id: string;
  plan_id: string;
  diff: ConfigDiff;
  rendered_summary: string;
  status: ApprovalStatus;
  decided_by: string | null;
  decided_at: number | null;
  created_at: number;
}

export interface IncidentSummary {
  incident_id: string;
  phase: string;
  scenario_id: string;
  risk: string | null;
}

export interface PlanStep {
  step_index: number;
  tool_name: string;
  params: Record<string, unknown>;
  rationale: string;
}

export interface IncidentDetail {
  incident_id: string;
  phase: string;
  scenario_id: string;
  report: {
    verdict: string;
    event_summary: string;
    affected_components: string[];
    risk: string;
  } | null;
  classification: {
    candidates: { technique_id: string; score: number }[];
    selected_technique_ids: string[];
    confidence: number;
  } | null;
  plan: { plan_id: string; steps: PlanStep[]; status: string } | null;
  recommendation: { guidance: string[]; reason: string } | null;
  approval_id: string | null;
  escalation_reason: string | null;
}

export interface AuditEntry {
  kind: string;
  approval_id?: string;
  incident_id?: string;
  [key: string]: unknown;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export type Decision = 'approve' | 'reject';
