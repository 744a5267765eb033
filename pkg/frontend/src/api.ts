// Thin client over the two service endpoints. No scoring happens here:
// every number rendered by the UI comes from an AnalyzeResponse field.

import type { AnalyzeRequest, AnalyzeResponse, HealthResponse, ServiceError } from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class AnalyzerClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setBaseUrl(url: string): void {
    this.baseUrl = url.replace(/\/$/, '');
  }

  async analyze(request: AnalyzeRequest): Promise<AnalyzeResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1/analyze`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
    if (!resp.ok) {
      let code = 'unknown';
      let message = `service returned ${resp.status}`;
      let field: string | undefined;
      try {
        const doc = (await resp.json()) as ServiceError;
        code = doc.error.code;
        message = doc.error.message;
        field = doc.error.field;
      } catch {
        // non-JSON error body; keep the status message
      }
      throw new ApiError(message, resp.status, code, field);
    }
    return (await resp.json()) as AnalyzeResponse;
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.fetchImpl(`${this.baseUrl}/v1/health`);
    if (!resp.ok) {
      throw new ApiError(`health returned ${resp.status}`, resp.status, 'health');
    }
    return (await resp.json()) as HealthResponse;
  }
}
