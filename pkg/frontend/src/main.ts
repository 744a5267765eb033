import { AnalyzerClient } from './api.js';
import { copyToClipboard, renderState, Elements } from './dom.js';
import { debounce } from './latest.js';
import { FormStore } from './state.js';

const SERVICE_URL_KEY = 'promptgauge.serviceUrl';
const LIVE_DEBOUNCE_MS = 400;

function grab<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function boot(): void {
  const els: Elements = {
    root: grab('app'),
    submit: grab('submit'),
    copy: grab('copy'),
    status: grab('status'),
    banner: grab('banner'),
    fieldError: grab('field-error'),
    gauges: grab('gauges'),
    badges: grab('badges'),
    suggestions: grab('suggestions'),
    bars: grab('bars'),
    composed: grab('composed'),
    fallback: grab('fallback'),
  };

  const client = new AnalyzerClient(
    localStorage.getItem(SERVICE_URL_KEY) ?? 'http://127.0.0.1:8571',
  );
  const store = new FormStore(client);
  void store.loadThresholds();

  const serviceUrl = grab<HTMLInputElement>('service-url');
  serviceUrl.value = localStorage.getItem(SERVICE_URL_KEY) ?? 'http://127.0.0.1:8571';
  serviceUrl.addEventListener('change', () => {
    localStorage.setItem(SERVICE_URL_KEY, serviceUrl.value);
    client.setBaseUrl(serviceUrl.value);
    void store.loadThresholds();
  });

  const liveToggle = grab<HTMLInputElement>('live');
  const liveSubmit = debounce(() => {
    if (liveToggle.checked) {
      store.submitLive();
    }
  }, LIVE_DEBOUNCE_MS);

  const bind = (id: string, name: 'description' | 'error_log' | 'libraries_frameworks' | 'resources') => {
    const input = grab<HTMLTextAreaElement | HTMLInputElement>(id);
    input.addEventListener('input', () => {
      store.setField(name, input.value);
      liveSubmit();
    });
  };
  bind('description', 'description');
  bind('error-log', 'error_log');
  bind('libs', 'libraries_frameworks');
  bind('resources', 'resources');

  const code = grab<HTMLTextAreaElement>('code-snippets');
  code.addEventListener('input', () => {
    // one snippet per blank-line separated block
    const blocks = code.value.split(/\n\s*\n/).filter((b) => b.trim() !== '');
    store.setField('code_snippets', blocks);
    liveSubmit();
  });

  els.submit.addEventListener('click', () => store.submit());
  grab('retry').addEventListener('click', () => store.submit());
  els.copy.addEventListener('click', () => {
    const state = store.snapshot();
    if (state.response) {
      void copyToClipboard(els, state.response);
    }
  });

  store.subscribe((state) => renderState(els, state, store.canSubmit()));
}

document.addEventListener('DOMContentLoaded', boot);
