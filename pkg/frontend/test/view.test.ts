import { describe, expect, it } from 'vitest';
import { buildReportView, copyText } from '../src/view.js';
import type { AnalyzeResponse, AnalyzeRequest } from '../src/types.js';
import golden from './fixtures/golden.json';

interface Fixture {
  request: AnalyzeRequest;
  response: AnalyzeResponse;
}

const FIXTURES = (golden as { fixtures: Fixture[] }).fixtures;
const THRESHOLDS = { contextual_richness: 50, specificity: 50, clarity: 50 };

describe('report view is a pure pass-through of the service response', () => {
  it('ships ten golden fixtures', () => {
    expect(FIXTURES).toHaveLength(10);
  });

  it('gauge values equal the service scores verbatim', () => {
    for (const fx of FIXTURES) {
      const view = buildReportView(fx.response, THRESHOLDS);
      expect(view.gauges).toHaveLength(3);
      const byKey = Object.fromEntries(view.gauges.map((g) => [g.key, g.value]));
      expect(byKey.contextual_richness).toBe(fx.response.report.scores.contextual_richness);
      expect(byKey.specificity).toBe(fx.response.report.scores.specificity);
      expect(byKey.clarity).toBe(fx.response.report.scores.clarity);
    }
  });

  it('probability, badges and suggestions mirror the response', () => {
    for (const fx of FIXTURES) {
      const view = buildReportView(fx.response, THRESHOLDS);
      expect(view.probabilityPercent).toBeCloseTo(
        fx.response.report.probability_effective * 100, 10);
      expect(view.badges.map((b) => b.kind)).toEqual(
        fx.response.report.flags.map((f) => f.kind));
      expect(view.suggestions).toEqual(fx.response.report.suggestions);
    }
  });

  it('any category below threshold comes with at least one suggestion', () => {
    for (const fx of FIXTURES) {
      const scores = fx.response.report.scores;
      const anyLow =
        scores.contextual_richness < THRESHOLDS.contextual_richness ||
        scores.specificity < THRESHOLDS.specificity ||
        scores.clarity < THRESHOLDS.clarity;
      if (anyLow) {
        expect(fx.response.report.suggestions.length).toBeGreaterThanOrEqual(1);
        const view = buildReportView(fx.response, THRESHOLDS);
        expect(view.suggestions.length).toBeGreaterThanOrEqual(1);
      }
    }
  });

  it('attribution bars carry the exact contributions', () => {
    for (const fx of FIXTURES) {
      const view = buildReportView(fx.response, THRESHOLDS);
      const contributions = fx.response.report.attributions.contributions;
      expect(view.bars.map((b) => [b.feature, b.contribution])).toEqual(
        Object.entries(contributions));
      for (const bar of view.bars) {
        expect(bar.widthPercent).toBeGreaterThanOrEqual(0);
        expect(bar.widthPercent).toBeLessThanOrEqual(100);
        expect(bar.positive).toBe(bar.contribution >= 0);
      }
    }
  });

  it('below-threshold marking follows the supplied thresholds', () => {
    const fx = FIXTURES[0];
    const view = buildReportView(fx.response, { contextual_richness: 101, specificity: 0, clarity: 0 });
    const byKey = Object.fromEntries(view.gauges.map((g) => [g.key, g.belowThreshold]));
    expect(byKey.contextual_richness).toBe(true);
    expect(byKey.specificity).toBe(false);
  });
});

describe('copy action', () => {
  it('copy text equals composed_prompt for every golden fixture', () => {
    for (const fx of FIXTURES) {
      expect(copyText(fx.response)).toBe(fx.response.report.composed_prompt);
    }
  });

  it('composed prompt starts with the description field', () => {
    for (const fx of FIXTURES) {
      const description = fx.request.fields?.description ?? '';
      expect(copyText(fx.response).startsWith(description.trim())).toBe(true);
    }
  });
});
