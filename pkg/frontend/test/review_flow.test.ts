/**
 * Scripted browser round-trip over the real UI modules against a mock /v1
 * service: load a queue of three, file accept / reject / replace verdicts,
 * verify the feedback log and queue drain, and that a duplicate verdict
 * surfaces a conflict without growing the log.
 */

import { beforeEach, afterEach, describe, expect, it } from 'vitest';

import { boot } from '../src/main.js';
import type { ReviewController } from '../src/controller.js';
import { MockService, sampleCwes, sampleQueue } from './mock_server.js';

let mock: MockService;
let uninstall: () => void;
let root: HTMLElement;

function flush(times = 6): Promise<void> {
  // drain chained microtasks from fetch -> state update -> render
  let p = Promise.resolve();
  for (let i = 0; i < times; i++) p = p.then(() => undefined);
  return p;
}

function bootUi(): ReviewController {
  return boot(root, { baseUrl: 'http://service.test', reviewer: 'sme-ui' });
}

function cards(): HTMLElement[] {
  return Array.from(root.querySelectorAll('[data-testid="card"]'));
}

function click(element: Element | null): void {
  expect(element, 'expected element to exist').toBeTruthy();
  (element as HTMLElement).click();
}

beforeEach(() => {
  mock = new MockService();
  for (const item of sampleQueue()) mock.addQueueItem(item);
  mock.cwes = sampleCwes();
  uninstall = mock.install();
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById('app') as HTMLElement;
});

afterEach(() => {
  uninstall();
});

describe('queue view', () => {
  it('renders one card per pending item, ascending score', async () => {
    bootUi();
    await flush();
    const rendered = cards();
    expect(rendered).toHaveLength(3);
    const ids = rendered.map((c) => c.querySelector('h2')?.textContent);
    expect(ids).toEqual(['CVE-2021-9001', 'CVE-2021-9002', 'CVE-2021-9003']);
    const scores = rendered.map((c) => c.querySelector('[data-testid="score"]')?.textContent ?? '');
    expect(scores[0]).toContain('0.410');
    expect(root.querySelector('[data-testid="path"]')?.textContent).toContain('CWE-10 → CWE-11');
    expect(root.querySelector('[data-testid="pending-count"]')?.textContent).toBe('3 pending');
  });

  it('shows the all-reviewed state on an empty queue', async () => {
    mock.queue = [];
    bootUi();
    await flush();
    expect(root.querySelector('[data-testid="all-reviewed"]')).toBeTruthy();
    expect(cards()).toHaveLength(0);
  });

  it('shows a blocking notice when the service has no active model', async () => {
    mock.modelId = null;
    bootUi();
    await flush();
    const banner = root.querySelector('[data-testid="banner"]');
    expect(banner?.textContent).toContain('No active model');
    expect(cards()).toHaveLength(0);
  });

  it('shows a connectivity banner with retry when the service is unreachable', async () => {
    uninstall();
    globalThis.fetch = (async () => {
      throw new TypeError('fetch failed');
    }) as typeof fetch;
    bootUi();
    await flush();
    expect(root.querySelector('[data-testid="banner"]')?.textContent).toContain('Cannot reach');
    // restore the mock and retry
    uninstall = mock.install();
    click(root.querySelector('[data-testid="retry"]'));
    await flush();
    expect(cards()).toHaveLength(3);
  });

  it('paginates with the cursor when the queue exceeds the page size', async () => {
    for (let i = 0; i < 25; i++) {
      mock.addQueueItem({
        cve_id: `CVE-2022-${1000 + i}`,
        description: `synthetic pending item ${i}`,
        cwe: 11,
        cwe_name: 'Buffer Errors',
        score: 0.8 + i / 1000,
        path: [10, 11],
        fallback: false,
      });
    }
    bootUi();
    await flush();
    expect(cards()).toHaveLength(20);
    click(root.querySelector('[data-testid="load-more"]'));
    await flush();
    expect(cards()).toHaveLength(28);
    expect(root.querySelector('[data-testid="load-more"]')).toBeNull();
  });
});

describe('verdict round trip', () => {
  it('accept, reject and replace drain the queue and append three records', async () => {
    bootUi();
    await flush();
    expect(mock.feedbackLog).toHaveLength(0);

    // accept the first card
    click(cards()[0]!.querySelector('[data-testid="accept"]'));
    await flush();
    expect(cards()).toHaveLength(2);

    // reject the (new) first card
    click(cards()[0]!.querySelector('[data-testid="reject"]'));
    await flush();
    expect(cards()).toHaveLength(1);

    // replace the last card: search, pick CWE-13, submit
    const card = cards()[0]!;
    const search = card.querySelector('[data-testid="cwe-search"]') as HTMLInputElement;
    search.value = 'sql';
    search.dispatchEvent(new Event('input', { bubbles: true }));
    await flush();
    click(card.querySelector('[data-testid="picker-option"][data-cwe="13"]'));
    await flush();
    click(card.querySelector('[data-testid="replace"]'));
    await flush();

    expect(cards()).toHaveLength(0);
    expect(root.querySelector('[data-testid="all-reviewed"]')).toBeTruthy();

    expect(mock.feedbackLog).toHaveLength(3);
    expect(mock.feedbackLog.map((r) => r.verdict)).toEqual(['accept', 'reject', 'replace']);
    expect(mock.feedbackLog.map((r) => r.record_id)).toEqual([1, 2, 3]);
    const replace = mock.feedbackLog[2]!;
    expect(replace.cve_id).toBe('CVE-2021-9003');
    expect(replace.proposed_cwe).toBe(14);
    expect(replace.replacement_cwe).toBe(13);
    expect(mock.feedbackLog.every((r) => r.reviewer === 'sme-ui')).toBe(true);
  });

  it('duplicate verdict surfaces a conflict and the log does not grow', async () => {
    // another reviewer session already filed this verdict
    mock.feedbackLog.push({
      record_id: 1,
      cve_id: 'CVE-2021-9001',
      proposed_cwe: 11,
      verdict: 'accept',
      replacement_cwe: null,
      reviewer: 'sme-ui',
      timestamp: new Date().toISOString(),
      model_generation: 'model-aaaa',
    });
    bootUi();
    await flush();
    // the mock queue already filters reviewed pairs; force the card back for the race
    mock.feedbackLog.pop();
    bootUi();
    await flush();
    mock.feedbackLog.push({
      record_id: 1,
      cve_id: 'CVE-2021-9001',
      proposed_cwe: 11,
      verdict: 'accept',
      replacement_cwe: null,
      reviewer: 'sme-ui',
      timestamp: new Date().toISOString(),
      model_generation: 'model-aaaa',
    });
    const before = mock.feedbackLog.length;

    click(cards()[0]!.querySelector('[data-testid="accept"]'));
    await flush();

    expect(mock.feedbackLog).toHaveLength(before); // no growth
    const banner = root.querySelector('[data-testid="banner"]');
    expect(banner?.textContent).toContain('Another reviewer already filed');
    expect(cards()).toHaveLength(3); // card rolled back, queue unchanged
  });

  it('rolls the card back on a non-201 response', async () => {
    bootUi();
    await flush();
    mock.failNextFeedbackWith = 500;
    click(cards()[0]!.querySelector('[data-testid="accept"]'));
    await flush();
    expect(cards()).toHaveLength(3);
    expect(cards()[0]!.querySelector('h2')?.textContent).toBe('CVE-2021-9001');
    expect(mock.feedbackLog).toHaveLength(0);
    expect(root.querySelector('[data-testid="banner"]')?.textContent).toContain('failed');
  });

  it('replace stays disabled until a CWE is chosen', async () => {
    bootUi();
    await flush();
    const card = cards()[0]!;
    const replaceButton = card.querySelector('[data-testid="replace"]') as HTMLButtonElement;
    expect(replaceButton.hasAttribute('disabled')).toBe(true);
    click(replaceButton);
    await flush();
    expect(mock.feedbackLog).toHaveLength(0); // disabled button must not submit
    expect(cards()).toHaveLength(3);
  });

  it('never issues non-GET requests except POST /v1/feedback', async () => {
    bootUi();
    await flush();
    click(cards()[0]!.querySelector('[data-testid="accept"]'));
    await flush();
    click(root.querySelector('[data-testid="reload"]'));
    await flush();
    const mutations = mock.requests.filter((r) => !r.startsWith('GET '));
    expect(mutations).toEqual(['POST /v1/feedback']);
  });
});
