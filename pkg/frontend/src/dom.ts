// DOM rendering for the form and the report panel.

import type { FormState } from './state.js';
import type { AnalyzeResponse } from './types.js';
import { buildReportView, copyText } from './view.js';

export interface Elements {
  root: HTMLElement;
  submit: HTMLButtonElement;
  copy: HTMLButtonElement;
  status: HTMLElement;
  banner: HTMLElement;
  fieldError: HTMLElement;
  gauges: HTMLElement;
  badges: HTMLElement;
  suggestions: HTMLElement;
  bars: HTMLElement;
  composed: HTMLElement;
  fallback: HTMLTextAreaElement;
}

export function renderState(els: Elements, state: FormState, canSubmit: boolean): void {
  els.submit.disabled = !canSubmit || state.phase === 'loading';
  els.copy.disabled = state.response === null;
  els.banner.hidden = state.banner === null;
  els.banner.textContent = state.banner ?? '';
  els.fieldError.hidden = state.fieldError === null;
  els.fieldError.textContent = state.fieldError ?? '';
  els.status.dataset.phase = state.phase;
  els.status.textContent = {
    idle: '',
    loading: 'Analyzing…',
    ready: '',
    stale: 'Inputs changed — results are stale',
    error: '',
  }[state.phase];
  els.root.classList.toggle('stale', state.phase === 'stale');

  if (state.response) {
    renderReport(els, state.response, state.thresholds);
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderReport(
  els: Elements,
  response: AnalyzeResponse,
  thresholds: Record<string, number>,
): void {
  const view = buildReportView(response, thresholds);

  els.gauges.replaceChildren();
  for (const gauge of view.gauges) {
    const wrap = el('div', `gauge ${gauge.belowThreshold ? 'low' : 'ok'}`);
    wrap.dataset.key = gauge.key;
    const dial = el('div', 'dial');
    const fill = el('div', 'fill');
    fill.style.width = `${gauge.value}%`;
    dial.appendChild(fill);
    wrap.appendChild(el('span', 'label', gauge.label));
    wrap.appendChild(dial);
    wrap.appendChild(el('span', 'value', gauge.value.toFixed(1)));
    els.gauges.appendChild(wrap);
  }
  els.gauges.appendChild(
    el('div', 'probability',
       `p(effective) ${view.probabilityPercent.toFixed(1)}%`));

  els.badges.replaceChildren();
  for (const badge of view.badges) {
    const node = el('span', 'badge', `${badge.kind} (${badge.severityPercent}%)`);
    node.title = badge.evidence;
    els.badges.appendChild(node);
  }

  els.suggestions.replaceChildren();
  for (const s of view.suggestions) {
    const item = el('li', `suggestion ${s.expected_direction}`);
    item.appendChild(el('code', 'target', s.target_feature));
    item.appendChild(el('span', 'text', ` ${s.text}`));
    els.suggestions.appendChild(item);
  }

  els.bars.replaceChildren();
  for (const bar of view.bars) {
    const row = el('div', `bar ${bar.positive ? 'pos' : 'neg'}`);
    row.appendChild(el('span', 'feature', bar.feature));
    const track = el('div', 'track');
    const fill = el('div', 'fill');
    fill.style.width = `${bar.widthPercent}%`;
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el('span', 'amount', bar.contribution.toFixed(4)));
    els.bars.appendChild(row);
  }

  els.composed.textContent = view.composedPrompt;
}

export async function copyToClipboard(
  els: Elements,
  response: AnalyzeResponse,
): Promise<boolean> {
  const text = copyText(response);
  try {
    await navigator.clipboard.writeText(text);
    els.fallback.hidden = true;
    return true;
  } catch {
    // clipboard denied: selectable fallback textarea
    els.fallback.hidden = false;
    els.fallback.value = text;
    els.fallback.focus();
    els.fallback.select();
    return false;
  }
}
