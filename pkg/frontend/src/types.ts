// Wire types for the analyzer service (POST /v1/analyze, GET /v1/health).

export interface TemplateFields {
  description: string;
  code_snippets: string[];
  error_log: string;
  libraries_frameworks: string;
  resources: string;
}

export interface AnalyzeRequest {
  fields?: TemplateFields;
  raw_prompt?: string;
  options?: { thresholds?: Record<string, number>; model?: string };
}

export interface CategoryScores {
  contextual_richness: number;
  specificity: number;
  clarity: number;
}

export interface GapFlag {
  kind: string;
  severity: number;
  evidence: string[];
}

export interface Suggestion {
  text: string;
  target_feature: string;
  expected_direction: 'increase' | 'decrease';
}

export interface Attributions {
  intercept: number;
  logit: number;
  probability: number;
  contributions: Record<string, number>;
}

export interface GapReport {
  scores: CategoryScores;
  probability_effective: number;
  flags: GapFlag[];
  attributions: Attributions;
  suggestions: Suggestion[];
  composed_prompt: string;
}

export interface AnalyzeResponse {
  report: GapReport;
  version: Record<string, string>;
}

export interface HealthResponse {
  status: string;
  model_fingerprint: string;
  asset_fingerprint: string;
  thresholds: Record<string, number>;
  detail: string;
}

export interface ServiceError {
  error: { code: string; message: string; field?: string };
}

export const EMPTY_FIELDS: TemplateFields = {
  description: '',
  code_snippets: [],
  error_log: '',
  libraries_frameworks: '',
  resources: '',
};

export function fieldsAreEmpty(fields: TemplateFields): boolean {
  return (
    fields.description.trim() === '' &&
    fields.code_snippets.every((s) => s.trim() === '') &&
    fields.error_log.trim() === '' &&
    fields.libraries_frameworks.trim() === '' &&
    fields.resources.trim() === ''
  );
}
