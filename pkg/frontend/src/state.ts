// Form state machine. Gauges must always reflect the response for the
// inputs on screen, so edits mark the state dirty until the response
// for the current inputs lands; stale responses are discarded by the
// latest-wins dispatcher.

import { AnalyzerClient, ApiError } from './api.js';
import { latestDispatcher, LatestDispatcher } from './latest.js';
import type { AnalyzeResponse, TemplateFields } from './types.js';
import { EMPTY_FIELDS, fieldsAreEmpty } from './types.js';

export type Phase = 'idle' | 'loading' | 'ready' | 'stale' | 'error';

export interface FormState {
  fields: TemplateFields;
  dirty: boolean;
  phase: Phase;
  response: AnalyzeResponse | null;
  fieldError: string | null;
  banner: string | null;
  thresholds: Record<string, number>;
}

export type Listener = (state: FormState) => void;

const DEFAULT_THRESHOLDS: Record<string, number> = {
  contextual_richness: 50,
  specificity: 50,
  clarity: 50,
};

export class FormStore {
  private state: FormState = {
    fields: { ...EMPTY_FIELDS },
    dirty: false,
    phase: 'idle',
    response: null,
    fieldError: null,
    banner: null,
    thresholds: { ...DEFAULT_THRESHOLDS },
  };

  private listeners: Listener[] = [];
  private dispatcher: LatestDispatcher<AnalyzeResponse> = latestDispatcher();
  private pendingLive = false;

  constructor(private client: AnalyzerClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.snapshot());
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  snapshot(): FormState {
    return { ...this.state, fields: { ...this.state.fields } };
  }

  private emit(patch: Partial<FormState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.snapshot());
    }
  }

  canSubmit(): boolean {
    return !fieldsAreEmpty(this.state.fields);
  }

  setField<K extends keyof TemplateFields>(name: K, value: TemplateFields[K]): void {
    const fields = { ...this.state.fields, [name]: value };
    // editing invalidates whatever response is on screen
    this.dispatcher.invalidate();
    this.emit({
      fields,
      dirty: true,
      phase: this.state.response ? 'stale' : 'idle',
      fieldError: null,
    });
  }

  async loadThresholds(): Promise<void> {
    try {
      const health = await this.client.health();
      this.emit({ thresholds: { ...DEFAULT_THRESHOLDS, ...health.thresholds } });
    } catch {
      // keep defaults; health is advisory for gauge coloring
    }
  }

  submit(): number {
    if (!this.canSubmit()) {
      return 0;
    }
    const request = { fields: { ...this.state.fields } };
    this.emit({ phase: 'loading', banner: null, fieldError: null });
    const fired = this.client.analyze(request);
    // flush a queued live submit once this settles, after apply/discard
    void fired.catch(() => undefined).finally(() => {
      queueMicrotask(() => this.flushPendingLive());
    });
    return this.dispatcher.dispatch(
      fired,
      (response) => {
        this.emit({ response, dirty: false, phase: 'ready' });
      },
      (err) => {
        if (err instanceof ApiError && err.status === 400) {
          this.emit({ phase: 'error', fieldError: err.message });
        } else {
          this.emit({ phase: 'error', banner: 'Analyzer service unreachable. Retry?' });
        }
      },
    );
  }

  // live mode keeps at most one request in flight; extra submissions
  // queue and fire once the current one settles
  submitLive(): void {
    if (!this.canSubmit()) {
      return;
    }
    if (this.dispatcher.inFlight()) {
      this.pendingLive = true;
      return;
    }
    this.submit();
  }

  private flushPendingLive(): void {
    if (this.pendingLive && !this.dispatcher.inFlight()) {
      this.pendingLive = false;
      if (this.state.dirty) {
        this.submit();
      }
    }
  }
}
