/**
 * Typed client for the threatpath /v1 HTTP API.
 *
 * The UI only ever mutates server state through POST /v1/feedback; every
 * other call is a GET.
 */

export interface ApiConfig {
  baseUrl: string;
  token?: string;
}

export interface QueueItem {
  cve_id: string;
  description: string;
  cwe: number;
  cwe_name: string;
  score: number;
  path: number[];
  fallback: boolean;
}

export interface QueuePage {
  items: QueueItem[];
  next_cursor: string | null;
  pending: number;
}

export type Verdict = 'accept' | 'reject' | 'replace';

export interface FeedbackRequest {
  cve_id: string;
  proposed_cwe: number;
  verdict: Verdict;
  replacement_cwe?: number;
  reviewer: string;
}

export interface FeedbackRecord {
  record_id: number;
  cve_id: string;
  proposed_cwe: number;
  verdict: Verdict;
  replacement_cwe: number | null;
  reviewer: string;
  timestamp: string;
  model_generation: string;
}

export interface CweSummary {
  id: number;
  name: string;
}

export interface HealthInfo {
  snapshot_id: string;
  active_model: string | null;
  feedback_records: number;
}

/** HTTP-level failure; status 0 means the service was unreachable. */
export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(status === 0 ? `service unreachable: ${detail}` : `HTTP ${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

export class ReviewApi {
  constructor(private readonly config: ApiConfig) {}

  private headers(json: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers['Content-Type'] = 'application/json';
    if (this.config.token) headers['Authorization'] = `Bearer ${this.config.token}`;
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(`${this.config.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : String(err));
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body: keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  fetchQueue(limit: number, cursor?: string): Promise<QueuePage> {
    const params = new URLSearchParams({ limit: String(limit) });
    if (cursor) params.set('cursor', cursor);
    return this.request<QueuePage>(`/v1/review-queue?${params}`, {
      headers: this.headers(false),
    });
  }

  submitFeedback(request: FeedbackRequest): Promise<FeedbackRecord> {
    return this.request<FeedbackRecord>('/v1/feedback', {
      method: 'POST',
      headers: this.headers(true),
      body: JSON.stringify(request),
    });
  }

  async searchCwes(query: string, limit = 20): Promise<CweSummary[]> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    const body = await this.request<{ cwes: CweSummary[] }>(`/v1/cwes?${params}`, {
      headers: this.headers(false),
    });
    return body.cwes;
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>('/v1/health', { headers: this.headers(false) });
  }
}
