/**
 * In-memory stand-in for the threatpath service, faithful to the documented
 * /v1 contract: keyset-paginated review queue, append-only feedback log with
 * the duplicate-verdict 409 rule, CWE search, optional bearer-token auth.
 */

import type { CweSummary, FeedbackRecord, QueueItem } from '../src/api.js';

interface StoredItem extends QueueItem {}

export class MockService {
  queue: StoredItem[] = [];
  feedbackLog: FeedbackRecord[] = [];
  cwes: CweSummary[] = [];
  modelId: string | null = 'model-aaaa';
  token: string | null = null;
  failNextFeedbackWith: number | null = null;
  requests: string[] = [];

  addQueueItem(item: StoredItem): void {
    this.queue.push(item);
    this.queue.sort((a, b) =>
      a.score - b.score || a.cve_id.localeCompare(b.cve_id) || a.cwe - b.cwe,
    );
  }

  private pendingItems(): StoredItem[] {
    const reviewed = new Set(
      this.feedbackLog
        .filter((r) => r.model_generation === this.modelId)
        .map((r) => `${r.cve_id}/${r.proposed_cwe}`),
    );
    return this.queue.filter((i) => !reviewed.has(`${i.cve_id}/${i.cwe}`));
  }

  /** Route one request; mirrors the FastAPI handlers. */
  handle(method: string, url: URL, headers: Record<string, string>, body: unknown):
    { status: number; body: unknown } {
    this.requests.push(`${method} ${url.pathname}`);
    if (this.token && headers['authorization'] !== `Bearer ${this.token}`) {
      return { status: 401, body: { detail: 'missing or invalid token' } };
    }

    if (method === 'GET' && url.pathname === '/v1/review-queue') {
      if (!this.modelId) return { status: 409, body: { detail: 'no active model' } };
      const limit = Number(url.searchParams.get('limit') ?? '20');
      const cursor = url.searchParams.get('cursor');
      let items = this.pendingItems();
      if (cursor) {
        const decoded = JSON.parse(atob(cursor)) as { m: string; k: [number, string, number] };
        if (decoded.m !== this.modelId) {
          return { status: 409, body: { detail: 'cursor from another model generation' } };
        }
        const [score, cve, cwe] = decoded.k;
        items = items.filter(
          (i) =>
            i.score > score ||
            (i.score === score && (i.cve_id > cve || (i.cve_id === cve && i.cwe > cwe))),
        );
      }
      const page = items.slice(0, limit);
      let nextCursor: string | null = null;
      if (items.length > limit && page.length > 0) {
        const last = page[page.length - 1]!;
        nextCursor = btoa(JSON.stringify({ m: this.modelId, k: [last.score, last.cve_id, last.cwe] }));
      }
      return { status: 200, body: { items: page, next_cursor: nextCursor, pending: items.length } };
    }

    if (method === 'POST' && url.pathname === '/v1/feedback') {
      if (!this.modelId) return { status: 409, body: { detail: 'no active model' } };
      if (this.failNextFeedbackWith !== null) {
        const status = this.failNextFeedbackWith;
        this.failNextFeedbackWith = null;
        return { status, body: { detail: 'injected failure' } };
      }
      const req = body as {
        cve_id: string; proposed_cwe: number; verdict: string;
        replacement_cwe?: number | null; reviewer: string;
      };
      if (req.verdict === 'replace' && req.replacement_cwe == null) {
        return { status: 422, body: { detail: 'replace verdict requires replacement_cwe' } };
      }
      const duplicate = this.feedbackLog.some(
        (r) =>
          r.cve_id === req.cve_id &&
          r.proposed_cwe === req.proposed_cwe &&
          r.reviewer === req.reviewer &&
          r.model_generation === this.modelId,
      );
      if (duplicate) {
        return { status: 409, body: { detail: 'already reviewed for this model' } };
      }
      const record: FeedbackRecord = {
        record_id: this.feedbackLog.length + 1,
        cve_id: req.cve_id,
        proposed_cwe: req.proposed_cwe,
        verdict: req.verdict as FeedbackRecord['verdict'],
        replacement_cwe: req.replacement_cwe ?? null,
        reviewer: req.reviewer,
        timestamp: new Date().toISOString(),
        model_generation: this.modelId,
      };
      this.feedbackLog.push(record);
      return { status: 201, body: record };
    }

    if (method === 'GET' && url.pathname === '/v1/cwes') {
      const q = (url.searchParams.get('q') ?? '').toLowerCase();
      const hits = this.cwes.filter(
        (c) => !q || c.name.toLowerCase().includes(q) || String(c.id) === q,
      );
      return { status: 200, body: { cwes: hits.slice(0, 20) } };
    }

    if (method === 'GET' && url.pathname === '/v1/health') {
      return {
        status: 200,
        body: {
          snapshot_id: 'snap-0000',
          active_model: this.modelId,
          feedback_records: this.feedbackLog.length,
        },
      };
    }

    return { status: 404, body: { detail: `no route ${method} ${url.pathname}` } };
  }

  /** Install as the global fetch implementation. Returns an uninstaller. */
  install(): () => void {
    const original = globalThis.fetch;
    const service = this;
    globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = new URL(typeof input === 'string' ? input : input.toString());
      const method = init?.method ?? 'GET';
      const headers: Record<string, string> = {};
      for (const [key, value] of Object.entries(init?.headers ?? {})) {
        headers[key.toLowerCase()] = value as string;
      }
      const body = init?.body ? JSON.parse(init.body as string) : undefined;
      const result = service.handle(method, url, headers, body);
      return new Response(JSON.stringify(result.body), {
        status: result.status,
        headers: { 'Content-Type': 'application/json' },
      });
    }) as typeof fetch;
    return () => {
      globalThis.fetch = original;
    };
  }
}

export function sampleQueue(): StoredItem[] {
  return [
    {
      cve_id: 'CVE-2021-9001',
      description: 'Heap memory corruption by buffer overflow in memviewer parsing packets',
      cwe: 11,
      cwe_name: 'Buffer Errors',
      score: 0.41,
      path: [10, 11],
      fallback: false,
    },
    {
      cve_id: 'CVE-2021-9002',
      description: 'SQL injection in the reports id parameter of dashboardapp',
      cwe: 13,
      cwe_name: 'SQL Injection',
      score: 0.55,
      path: [12, 13],
      fallback: false,
    },
    {
      cve_id: 'CVE-2021-9003',
      description: 'Remote attackers run arbitrary shell commands via the exec field',
      cwe: 14,
      cwe_name: 'Command Injection',
      score: 0.72,
      path: [12, 14],
      fallback: false,
    },
  ];
}

export function sampleCwes(): CweSummary[] {
  return [
    { id: 10, name: 'Memory Safety Root' },
    { id: 11, name: 'Buffer Errors' },
    { id: 12, name: 'Injection Root' },
    { id: 13, name: 'SQL Injection' },
    { id: 14, name: 'Command Injection' },
  ];
}
