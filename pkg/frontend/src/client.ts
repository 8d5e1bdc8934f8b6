/** Thin HTTP client for the ranshield service. The console performs only
 * reads plus the single decision write; no other mutating endpoint is
 * reachable from here. */

import type {
  ApiErrorBody,
  ApprovalRequest,
  AuditEntry,
  Decision,
  IncidentDetail,
  IncidentSummary,
} from './types.js';

/** Carries the service's machine error code verbatim. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ConsoleClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      const err: ApiErrorBody =
        body && typeof body.code === 'string'
          ? body
          : { code: 'INTERNAL', message: `HTTP ${response.status}` };
      throw new ApiError(response.status, err);
    }
    return body as T;
  }

  listIncidents(): Promise<IncidentSummary[]> {
    return this.request('/incidents');
  }

  getIncident(incidentId: string): Promise<IncidentDetail> {
    return this.request(`/incidents/${encodeURIComponent(incidentId)}`);
  }

  /** Long-polls the pending queue; the server holds the request up to
   * waitMs and returns early once something is pending. */
  listPendingApprovals(waitMs = 2000): Promise<ApprovalRequest[]> {
    return this.request(`/approvals?status=pending&wait=${waitMs}`);
  }

  listApprovals(): Promise<ApprovalRequest[]> {
    return this.request('/approvals');
  }

  submitDecision(
    approvalId: string,
    decision: Decision,
    operatorId: string,
  ): Promise<ApprovalRequest> {
    return this.request(
      `/approvals/${encodeURIComponent(approvalId)}/decision`,
      {
        method: 'POST',
        headers: {
          'Content-Type': 'application/json',
          'X-Operator-Id': operatorId,
        },
        body: JSON.stringify({ decision }),
      },
    );
  }

  getAudit(): Promise<AuditEntry[]> {
    return this.request('/audit');
  }
}
