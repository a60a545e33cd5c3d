/** DOM wiring: a keyboard-driven queue on the left, the current warning
 * plus the rule workbench on the right. j/k move, p/f decide, e edits. */

import { TriageApi } from './api.js';
import { WarningQueue } from './queue.js';
import { RuleWorkbench } from './workbench.js';
import type { Transition, WarningEntry } from './types.js';

export interface AppOptions {
  baseUrl?: string;
  annotator?: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function ruleList(title: string, rules: string[]): HTMLElement {
  const wrap = el('div', 'rule-block');
  wrap.appendChild(el('h4', '', title));
  const list = el('ul');
  for (const rule of rules) {
    const entry = el('li');
    entry.appendChild(el('code', '', rule));
    list.appendChild(entry);
  }
  if (!rules.length) list.appendChild(el('li', 'empty', '(none)'));
  wrap.appendChild(list);
  return wrap;
}

function transitionTable(transitions: Transition[]): HTMLElement {
  const table = el('table', 'preview-table');
  const head = el('tr');
  for (const column of ['system', 'before', 'after', '']) {
    head.appendChild(el('th', '', column));
  }
  table.appendChild(head);
  for (const transition of transitions) {
    const row = el('tr', transition.changed ? 'changed' : '');
    row.appendChild(el('td', '', transition.system));
    row.appendChild(el('td', `v-${transition.before}`, transition.before));
    row.appendChild(el('td', `v-${transition.after}`, transition.after));
    row.appendChild(el('td', '', transition.changed ? 'flips' : ''));
    table.appendChild(row);
  }
  return table;
}

export class TriageApp {
  readonly api: TriageApi;
  readonly queue: WarningQueue;
  workbench: RuleWorkbench | null = null;
  readonly annotator: string;
  private statusLine = '';

  constructor(
    private readonly root: HTMLElement,
    options: AppOptions = {},
  ) {
    this.api = new TriageApi(options.baseUrl ?? '');
    this.queue = new WarningQueue(this.api);
    this.annotator = options.annotator ?? 'annotator';
  }

  async start(): Promise<void> {
    await this.queue.refresh();
    this.render();
    document.addEventListener('keydown', (event) => this.onKey(event));
  }

  async onKey(event: KeyboardEvent): Promise<void> {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === 'INPUT' || target.tagName === 'TEXTAREA')) {
      if (event.key === 'Escape') (target as HTMLInputElement).blur();
      return;
    }
    switch (event.key) {
      case 'j':
        this.queue.next();
        break;
      case 'k':
        this.queue.previous();
        break;
      case 'p':
        await this.decide('pass');
        break;
      case 'f':
        await this.decide('fail');
        break;
      case 'e': {
        event.preventDefault();
        const input = this.root.querySelector<HTMLInputElement>('#rule-expression');
        input?.focus();
        return;
      }
      case 'r':
        await this.queue.refresh();
        break;
      default:
        return;
    }
    this.render();
  }

  async decide(verdict: 'pass' | 'fail'): Promise<void> {
    if (this.queue.isEmpty()) return;
    const entry = this.queue.current()!;
    const outcome = await this.queue.decide(verdict, this.annotator);
    this.statusLine =
      outcome === 'decided'
        ? `${entry.system}/${entry.item}: ${verdict} recorded`
        : `${entry.system}/${entry.item} was already decided; queue refreshed`;
    this.render();
  }

  async previewRule(): Promise<void> {
    if (!this.workbench) return;
    this.readDraft();
    await this.workbench.preview(this.annotator);
    this.render();
  }

  async commitRule(): Promise<void> {
    if (!this.workbench) return;
    this.readDraft();
    const preview = await this.workbench.preview(this.annotator);
    if (preview.error) {
      this.render();
      return;
    }
    await this.workbench.commit(this.annotator);
    this.statusLine = `rule committed on ${this.workbench.item}`;
    await this.queue.refresh();
    this.workbench = null;
    this.render();
  }

  private readDraft(): void {
    if (!this.workbench) return;
    const kind = this.root.querySelector<HTMLSelectElement>('#rule-kind');
    const expression = this.root.querySelector<HTMLInputElement>('#rule-expression');
    const caseFlag = this.root.querySelector<HTMLInputElement>('#rule-ci');
    if (kind) this.workbench.draft.kind = kind.value as 'positive' | 'negative' | 'exact';
    if (expression) {
      if (this.workbench.draft.kind === 'exact') {
        this.workbench.draft.text = expression.value;
      } else {
        this.workbench.draft.expression = expression.value;
      }
    }
    if (caseFlag) this.workbench.draft.caseInsensitive = caseFlag.checked;
  }

  render(): void {
    const entry = this.queue.current();
    if (this.workbench && (!entry || this.workbench.item !== entry.item)) {
      this.workbench = entry ? new RuleWorkbench(this.api, entry.item) : null;
    }
    if (!this.workbench && entry) {
      this.workbench = new RuleWorkbench(this.api, entry.item);
    }
    this.root.replaceChildren(this.renderHeader(), this.renderBody(entry));
  }

  private renderHeader(): HTMLElement {
    const header = el('header');
    header.appendChild(el('h1', '', 'warning triage'));
    header.appendChild(
      el('span', 'counts', `${this.queue.total} pending · v${this.queue.version}`),
    );
    if (this.statusLine) header.appendChild(el('span', 'status', this.statusLine));
    header.appendChild(el('span', 'keys', 'j/k move · p pass · f fail · e edit rule'));
    return header;
  }

  private renderBody(entry: WarningEntry | null): HTMLElement {
    const body = el('main');
    body.appendChild(this.renderList());
    body.appendChild(entry ? this.renderDetail(entry) : el('section', 'detail empty', 'queue is empty'));
    return body;
  }

  private renderList(): HTMLElement {
    const list = el('section', 'queue');
    this.queue.entries.forEach((entry, position) => {
      const row = el(
        'div',
        position === this.queue.index ? 'queue-row selected' : 'queue-row',
      );
      row.appendChild(el('span', 'pair', `${entry.item} · ${entry.system}`));
      row.appendChild(el('span', 'cause', entry.cause));
      row.addEventListener('click', () => {
        this.queue.index = position;
        this.render();
      });
      list.appendChild(row);
    });
    return list;
  }

  private renderDetail(entry: WarningEntry): HTMLElement {
    const detail = el('section', 'detail');
    detail.appendChild(el('h2', '', `${entry.item} · ${entry.system}`));
    detail.appendChild(el('p', 'meta', `${entry.phenomenon} (${entry.category ?? '?'}) · ${entry.cause}`));
    detail.appendChild(el('p', 'source', entry.source));
    detail.appendChild(el('p', 'output', entry.output || '(empty output)'));

    const decisions = el('div', 'decisions');
    const passButton = el('button', 'pass', 'pass (p)');
    passButton.id = 'decide-pass';
    passButton.addEventListener('click', () => void this.decide('pass'));
    const failButton = el('button', 'fail', 'fail (f)');
    failButton.id = 'decide-fail';
    failButton.addEventListener('click', () => void this.decide('fail'));
    decisions.append(passButton, failButton);
    detail.appendChild(decisions);

    detail.appendChild(
      ruleList('positive', entry.rules.positive.map((rule) => rule.expression)),
    );
    detail.appendChild(
      ruleList('negative', entry.rules.negative.map((rule) => rule.expression)),
    );
    detail.appendChild(ruleList('exact', entry.rules.exact));
    detail.appendChild(this.renderWorkbench());
    return detail;
  }

  private renderWorkbench(): HTMLElement {
    const section = el('section', 'workbench');
    section.appendChild(el('h3', '', 'draft a rule'));

    const kind = el('select');
    kind.id = 'rule-kind';
    for (const option of ['positive', 'negative', 'exact']) {
      const node = el('option', '', option);
      node.value = option;
      kind.appendChild(node);
    }
    kind.value = this.workbench?.draft.kind ?? 'positive';

    const expression = el('input');
    expression.id = 'rule-expression';
    expression.placeholder = 'pattern or exact sentence';
    expression.value =
      this.workbench?.draft.kind === 'exact'
        ? this.workbench.draft.text
        : this.workbench?.draft.expression ?? '';

    const caseFlag = el('input');
    caseFlag.id = 'rule-ci';
    caseFlag.type = 'checkbox';
    caseFlag.checked = this.workbench?.draft.caseInsensitive ?? false;

    const previewButton = el('button', '', 'preview');
    previewButton.id = 'rule-preview';
    previewButton.addEventListener('click', () => void this.previewRule());
    const commitButton = el('button', '', 'commit');
    commitButton.id = 'rule-commit';
    commitButton.addEventListener('click', () => void this.commitRule());

    section.append(kind, expression, caseFlag, previewButton, commitButton);

    const preview = this.workbench?.lastPreview;
    if (preview?.error) {
      section.appendChild(el('p', 'pattern-error', preview.error));
    } else if (preview?.response) {
      section.appendChild(transitionTable(preview.response.transitions));
    }
    return section;
  }
}

export function mount(root: HTMLElement, options: AppOptions = {}): TriageApp {
  const app = new TriageApp(root, options);
  void app.start();
  return app;
}

declare global {
  interface Window {
    mtsuiteApp?: TriageApp;
  }
}

if (typeof document !== 'undefined') {
  const root = document.getElementById('app');
  if (root) {
    window.mtsuiteApp = mount(root, {
      baseUrl: new URLSearchParams(window.location.search).get('api') ?? '',
    });
  }
}
