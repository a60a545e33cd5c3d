/** Payload shapes of the triage service API (see docs/api.md). */

export type Verdict = 'pass' | 'fail' | 'warning';
export type WarningCause = 'no-match' | 'conflict' | 'empty-output';
export type RuleKind = 'positive' | 'negative' | 'exact';

export interface PatternRule {
  expression: string;
  case_insensitive: boolean;
}

export interface ItemRules {
  positive: PatternRule[];
  negative: PatternRule[];
  exact: string[];
}

export interface WarningEntry {
  item: string;
  system: string;
  source: string;
  output: string;
  phenomenon: string;
  category: string | null;
  cause: WarningCause;
  rules: ItemRules;
}

export interface WarningsPage {
  total: number;
  items: WarningEntry[];
  cursor: number | null;
  version: number;
}

export interface WarningFilters {
  system?: string;
  category?: string;
  phenomenon?: string;
  cause?: WarningCause;
}

export interface AnnotationEvent {
  seq: number;
  ts: string;
  annotator: string;
  kind: string;
  item: string;
  system: string | null;
  payload: Record<string, unknown>;
}

export interface JudgmentInfo {
  system: string;
  item: string;
  verdict: Verdict;
  cause: string;
  decided_by: 'automatic' | 'human';
}

export interface DecisionRequest {
  item: string;
  system: string;
  verdict: 'pass' | 'fail';
  annotator: string;
  override?: boolean;
}

export interface DecisionResponse {
  event: AnnotationEvent;
  judgment: JudgmentInfo;
  version: number;
}

export interface RuleRequest {
  item: string;
  kind: RuleKind;
  annotator: string;
  expression?: string;
  case_insensitive?: boolean;
  text?: string;
}

export interface Transition {
  system: string;
  before: Verdict;
  before_cause: string;
  after: Verdict;
  after_cause: string;
  changed: boolean;
}

export interface RuleResponse {
  event: AnnotationEvent | null;
  transitions: Transition[];
  version: number;
}

export interface ItemOutput {
  system: string;
  text: string;
  verdict: Verdict | null;
  cause: string | null;
  decided_by: string | null;
}

export interface ItemDetail {
  item: string;
  source: string;
  phenomenon: string;
  phenomenon_name: string;
  category: string | null;
  note: string | null;
  rules: ItemRules;
  outputs: ItemOutput[];
  version: number;
}

export interface SystemStats {
  system: string;
  pairs: number;
  warnings_before: number;
  warnings_after: number;
  rate_before: number;
  rate_after: number;
  decided: number;
}

export interface StatsResponse {
  systems: SystemStats[];
  validated_outputs: number;
  version: number;
}
