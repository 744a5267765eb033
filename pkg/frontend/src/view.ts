// Pure view-model builders. Every number here is copied from an
// AnalyzeResponse field; the UI computes no scores of its own.

import type { AnalyzeResponse, GapFlag, Suggestion } from './types.js';

export interface GaugeView {
  key: string;
  label: string;
  value: number;          // verbatim service score, 0..100
  belowThreshold: boolean;
}

export interface BadgeView {
  kind: string;
  severityPercent: number;
  evidence: string;
}

export interface BarView {
  feature: string;
  contribution: number;
  widthPercent: number;   // |contribution| relative to the largest bar
  positive: boolean;
}

export interface ReportView {
  gauges: GaugeView[];
  probabilityPercent: number;
  badges: BadgeView[];
  suggestions: Suggestion[];
  bars: BarView[];
  composedPrompt: string;
}

const GAUGE_LABELS: Array<[keyof AnalyzeResponse['report']['scores'], string]> = [
  ['contextual_richness', 'Contextual richness'],
  ['specificity', 'Specificity'],
  ['clarity', 'Clarity'],
];

export function buildReportView(
  response: AnalyzeResponse,
  thresholds: Record<string, number>,
): ReportView {
  const report = response.report;
  const gauges = GAUGE_LABELS.map(([key, label]) => ({
    key: key as string,
    label,
    value: report.scores[key],
    belowThreshold: report.scores[key] < (thresholds[key as string] ?? 50),
  }));
  const badges = report.flags.map((flag: GapFlag) => ({
    kind: flag.kind,
    severityPercent: Math.round(flag.severity * 100),
    evidence: flag.evidence.join(', '),
  }));
  const contributions = Object.entries(report.attributions.contributions);
  const largest = Math.max(1e-12, ...contributions.map(([, v]) => Math.abs(v)));
  const bars = contributions.map(([feature, value]) => ({
    feature,
    contribution: value,
    widthPercent: (Math.abs(value) / largest) * 100,
    positive: value >= 0,
  }));
  return {
    gauges,
    probabilityPercent: report.probability_effective * 100,
    badges,
    suggestions: [...report.suggestions],
    bars,
    composedPrompt: report.composed_prompt,
  };
}

export function copyText(response: AnalyzeResponse): string {
  // pass-through contract: the clipboard gets composed_prompt verbatim
  return response.report.composed_prompt;
}
