/** Rule workbench: draft a pattern or exact translation for one item,
 * live-test it against every system's pending output via the service's
 * dry-run endpoint, then commit exactly one annotation event. */

import { ApiError, TriageApi } from './api.js';
import type { RuleKind, RuleRequest, RuleResponse } from './types.js';

export interface RuleDraft {
  kind: RuleKind;
  expression: string;
  caseInsensitive: boolean;
  text: string;
}

export interface PreviewState {
  response: RuleResponse | null;
  error: string | null; // compile error or validation message, shown inline
}

export class RuleWorkbench {
  draft: RuleDraft = { kind: 'positive', expression: '', caseInsensitive: false, text: '' };
  lastPreview: PreviewState = { response: null, error: null };

  constructor(
    private readonly api: TriageApi,
    public readonly item: string,
  ) {}

  private toRequest(annotator: string): RuleRequest {
    const base = { item: this.item, kind: this.draft.kind, annotator };
    if (this.draft.kind === 'exact') {
      return { ...base, text: this.draft.text };
    }
    return {
      ...base,
      expression: this.draft.expression,
      case_insensitive: this.draft.caseInsensitive,
    };
  }

  /** Dry run: verdict transitions the draft would cause, nothing appended. */
  async preview(annotator: string): Promise<PreviewState> {
    try {
      const response = await this.api.previewRule(this.toRequest(annotator));
      this.lastPreview = { response, error: null };
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) {
        this.lastPreview = { response: null, error: error.message };
      } else {
        throw error;
      }
    }
    return this.lastPreview;
  }

  /** Commit the draft; the service appends exactly one event. */
  async commit(annotator: string): Promise<RuleResponse> {
    const response = await this.api.addRule(this.toRequest(annotator));
    this.lastPreview = { response: null, error: null };
    return response;
  }
}
