import { describe, expect, it } from 'vitest';

import { ApiError, TriageApi } from '../src/api';
import { sampleService } from './fakeService';

function makeApi() {
  const service = sampleService();
  return { service, api: new TriageApi('', service.fetch) };
}

describe('TriageApi', () => {
  it('lists warnings in stable (item, system) order', async () => {
    const { api } = makeApi();
    const page = await api.listWarnings();
    expect(page.total).toBe(2);
    expect(page.items.map((entry) => [entry.item, entry.system])).toEqual([
      ['mwe-001', 'alpha'],
      ['neg-001', 'beta'],
    ]);
  });

  it('forwards filters as query parameters', async () => {
    const { api } = makeApi();
    const page = await api.listWarnings({ category: 'negation' });
    expect(page.items).toHaveLength(1);
    expect(page.items[0].item).toBe('neg-001');
  });

  it('paginates with cursors', async () => {
    const { api } = makeApi();
    const first = await api.listWarnings({}, 0, 1);
    expect(first.items).toHaveLength(1);
    expect(first.cursor).toBe(1);
    const second = await api.listWarnings({}, first.cursor!, 1);
    expect(second.items[0].item).toBe('neg-001');
    expect(second.cursor).toBeNull();
  });

  it('maps HTTP failures to ApiError with status', async () => {
    const { api } = makeApi();
    await expect(
      api.submitDecision({ item: 'ghost', system: 'alpha', verdict: 'pass', annotator: 'v' }),
    ).rejects.toMatchObject({ status: 404 });
    await expect(
      api.addRule({ item: 'mwe-001', kind: 'positive', expression: '([a', annotator: 'v' }),
    ).rejects.toBeInstanceOf(ApiError);
  });

  it('previewRule hits the dry-run endpoint and appends nothing', async () => {
    const { api, service } = makeApi();
    const response = await api.previewRule({
      item: 'mwe-001',
      kind: 'positive',
      expression: 'right way',
      annotator: 'v',
    });
    expect(response.event).toBeNull();
    expect(service.events).toHaveLength(0);
  });
});
