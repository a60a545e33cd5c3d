/** Thin typed client for the triage service. All truth lives server-side. */

import type {
  DecisionRequest,
  DecisionResponse,
  ItemDetail,
  RuleRequest,
  RuleResponse,
  StatsResponse,
  WarningFilters,
  WarningsPage,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body?.detail === 'string') return body.detail;
    return JSON.stringify(body?.detail ?? body);
  } catch {
    return response.statusText;
  }
}

export class TriageApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  listWarnings(filters: WarningFilters = {}, cursor = 0, limit = 200): Promise<WarningsPage> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    params.set('cursor', String(cursor));
    params.set('limit', String(limit));
    return this.request<WarningsPage>(`/warnings?${params}`);
  }

  submitDecision(request: DecisionRequest): Promise<DecisionResponse> {
    return this.post<DecisionResponse>('/decisions', request);
  }

  addRule(request: RuleRequest): Promise<RuleResponse> {
    return this.post<RuleResponse>('/rules', request);
  }

  /** Live preview: same payload, nothing appended server-side. */
  previewRule(request: RuleRequest): Promise<RuleResponse> {
    return this.post<RuleResponse>('/rules?dry_run=true', request);
  }

  getItem(itemId: string): Promise<ItemDetail> {
    return this.request<ItemDetail>(`/items/${encodeURIComponent(itemId)}`);
  }

  getStats(): Promise<StatsResponse> {
    return this.request<StatsResponse>('/stats');
  }

  reevaluate(): Promise<{ version: number }> {
    return this.post<{ version: number }>('/reevaluate', {});
  }
}
