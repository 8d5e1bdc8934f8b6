import { describe, expect, it, vi } from 'vitest';

import { ApiError, ConsoleClient } from '../src/client.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

const PENDING = [
  {
    approval_id: 'APR-0001',
    incident_id: 'INC-0001',
    plan_id: 'plan-1',
    diff: {
      base_version: 1,
      changes: [
        { path: 'security.ciphering_algorithms', op: 'remove_list_item', value: 'nea0' },
        { path: 'security.integrity_algorithms', op: 'remove_list_item', value: 'nia0' },
      ],
    },
    rendered_summary:
      "remove_list_item security.ciphering_algorithms: ['nea0', 'nea2'] -> ['nea2']\n" +
      "remove_list_item security.integrity_algorithms: ['nia0', 'nia2'] -> ['nia2']",
    status: 'pending',
    decided_by: null,
    decided_at: null,
    created_at: 1000,
  },
];

describe('ConsoleClient', () => {
  it('long-polls the pending queue with the wait parameter', async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(PENDING));
    const client = new ConsoleClient('http://svc:8470', fetchFn);

    const approvals = await client.listPendingApprovals(2000);

    expect(fetchFn).toHaveBeenCalledWith(
      'http://svc:8470/approvals?status=pending&wait=2000',
      undefined,
    );
    expect(approvals).toHaveLength(1);
    expect(approvals[0].approval_id).toBe('APR-0001');
  });

  it('sends the decision with the operator header', async () => {
    const decided = { ...PENDING[0], status: 'approved', decided_by: 'alice' };
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse(decided));
    const client = new ConsoleClient('http://svc:8470/', fetchFn);

    const result = await client.submitDecision('APR-0001', 'approve', 'alice');

    const [url, init] = fetchFn.mock.calls[0];
    expect(url).toBe('http://svc:8470/approvals/APR-0001/decision');
    expect(init.method).toBe('POST');
    expect(init.headers['X-Operator-Id']).toBe('alice');
    expect(JSON.parse(init.body)).toEqual({ decision: 'approve' });
    expect(result.status).toBe('approved');
  });

  it('surfaces server error codes verbatim', async () => {
    const fetchFn = vi.fn().mockResolvedValue(
      jsonResponse({ code: 'ALREADY_DECIDED', message: 'already decided' }, 409),
    );
    const client = new ConsoleClient('http://svc:8470', fetchFn);

    const err = await client
      .submitDecision('APR-0001', 'reject', 'bob')
      .catch((e: unknown) => e);

    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe('ALREADY_DECIDED');
    expect((err as ApiError).status).toBe(409);
  });

  it('maps unshaped error bodies to INTERNAL', async () => {
    const fetchFn = vi.fn().mockResolvedValue(jsonResponse({ oops: 1 }, 500));
    const client = new ConsoleClient('http://svc:8470', fetchFn);

    const err = await client.listIncidents().catch((e: unknown) => e);

    expect((err as ApiError).code).toBe('INTERNAL');
  });

  it('reads incidents and audit without mutating anything', async () => {
    const fetchFn = vi
      .fn()
      .mockResolvedValueOnce(
        jsonResponse([
          { incident_id: 'INC-0001', phase: 'mitigated', scenario_id: 's', risk: 'high' },
        ]),
      )
      .mockResolvedValueOnce(jsonResponse([{ kind: 'applied' }]));
    const client = new ConsoleClient('http://svc:8470', fetchFn);

    await client.listIncidents();
    await client.getAudit();

    for (const [, init] of fetchFn.mock.calls) {
      expect(init?.method ?? 'GET').toBe('GET');
    }
  });
});
