/** Warning-queue state: a cursor over pending warnings with pass/fail
 * decisions posted to the service. The queue never invents verdicts;
 * every displayed state comes from the last refresh or mutation reply. */

import { ApiError, TriageApi } from './api.js';
import type { StatsResponse, WarningEntry, WarningFilters } from './types.js';

export type DecideOutcome = 'decided' | 'stale';

export class WarningQueue {
  entries: WarningEntry[] = [];
  index = 0;
  total = 0;
  version = 0;

  constructor(
    private readonly api: TriageApi,
    public filters: WarningFilters = {},
    private readonly pageLimit = 200,
  ) {}

  /** Reload the queue from the service, following pagination cursors. */
  async refresh(): Promise<void> {
    const entries: WarningEntry[] = [];
    let cursor: number | null = 0;
    let total = 0;
    let version = 0;
    while (cursor !== null) {
      const page = await this.api.listWarnings(this.filters, cursor, this.pageLimit);
      entries.push(...page.items);
      total = page.total;
      version = page.version;
      cursor = page.cursor;
    }
    this.entries = entries;
    this.total = total;
    this.version = version;
    if (this.index >= entries.length) {
      this.index = Math.max(0, entries.length - 1);
    }
  }

  current(): WarningEntry | null {
    return this.entries[this.index] ?? null;
  }

  isEmpty(): boolean {
    return this.entries.length === 0;
  }

  next(): void {
    if (this.index < this.entries.length - 1) this.index += 1;
  }

  previous(): void {
    if (this.index > 0) this.index -= 1;
  }

  /** Decide the current warning. A 409 means someone got there first:
   * the queue refreshes and reports the entry as stale. */
  async decide(verdict: 'pass' | 'fail', annotator: string): Promise<DecideOutcome> {
    const entry = this.current();
    if (entry === null) throw new Error('queue is empty');
    try {
      const response = await this.api.submitDecision({
        item: entry.item,
        system: entry.system,
        verdict,
        annotator,
      });
      this.version = response.version;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refresh();
        return 'stale';
      }
      throw error;
    }
    this.entries.splice(this.index, 1);
    this.total = Math.max(0, this.total - 1);
    if (this.index >= this.entries.length) {
      this.index = Math.max(0, this.entries.length - 1);
    }
    return 'decided';
  }

  stats(): Promise<StatsResponse> {
    return this.api.getStats();
  }
}
