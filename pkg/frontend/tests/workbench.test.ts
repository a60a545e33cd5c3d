import { describe, expect, it } from 'vitest';

import { TriageApi } from '../src/api';
import { RuleWorkbench } from '../src/workbench';
import { sampleService } from './fakeService';

function makeWorkbench(item = 'mwe-001') {
  const service = sampleService();
  const api = new TriageApi('', service.fetch);
  return { service, workbench: new RuleWorkbench(api, item) };
}

describe('RuleWorkbench', () => {
  it('preview shows which outputs would flip without appending', async () => {
    const { workbench, service } = makeWorkbench();
    workbench.draft.expression = 'right way';
    const preview = await workbench.preview('vee');
    expect(preview.error).toBeNull();
    const flips = preview.response!.transitions.filter((transition) => transition.changed);
    expect(flips).toEqual([
      expect.objectContaining({ system: 'alpha', before: 'warning', after: 'pass' }),
    ]);
    expect(service.events).toHaveLength(0);
  });

  it('an invalid pattern surfaces the compile error inline', async () => {
    const { workbench, service } = makeWorkbench();
    workbench.draft.expression = '([a';
    const preview = await workbench.preview('vee');
    expect(preview.response).toBeNull();
    expect(preview.error).toMatch(/pattern/i);
    expect(service.events).toHaveLength(0);
  });

  it('commit appends exactly one event', async () => {
    const { workbench, service } = makeWorkbench();
    workbench.draft.expression = 'right way';
    const response = await workbench.commit('vee');
    expect(response.event?.kind).toBe('add-positive-pattern');
    expect(service.events).toHaveLength(1);
    expect(service.events[0].payload).toEqual({
      expression: 'right way',
      case_insensitive: false,
    });
  });

  it('exact drafts send text instead of an expression', async () => {
    const { workbench, service } = makeWorkbench();
    workbench.draft.kind = 'exact';
    workbench.draft.text = "You're on the right way.";
    const response = await workbench.commit('vee');
    expect(response.event?.kind).toBe('add-exact-translation');
    expect(service.events[0].payload).toEqual({ text: "You're on the right way." });
  });

  it('committed rules clear the warning from the queue view', async () => {
    const { workbench, service } = makeWorkbench();
    workbench.draft.expression = 'right way';
    await workbench.commit('vee');
    const api = new TriageApi('', service.fetch);
    const page = await api.listWarnings();
    expect(page.items.some((entry) => entry.item === 'mwe-001')).toBe(false);
  });
});
