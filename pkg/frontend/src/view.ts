/**
 * DOM rendering for the review queue: cards, verdict controls, CWE picker.
 *
 * Rendering is a pure function of ReviewState plus a little per-card local
 * state for the replace picker; test hooks use data-testid attributes.
 */

import type { CweSummary, QueueItem, ReviewApi, Verdict } from './api.js';
import type { ReviewController, ReviewState } from './controller.js';

const BANNER_TEXT: Record<string, string> = {
  connectivity: 'Cannot reach the analysis service.',
  'no-model': 'No active model on the service; ask an operator to activate one.',
  conflict: 'Another reviewer already filed a verdict for that mapping.',
  error: 'Submitting the verdict failed; the card was restored.',
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

export class ReviewView {
  private pickerResults = new Map<string, CweSummary[]>();
  private pickerChoice = new Map<string, number>();

  constructor(
    private readonly root: HTMLElement,
    private readonly controller: ReviewController,
    private readonly api: ReviewApi,
  ) {}

  mount(): void {
    this.controller.subscribe((state) => this.render(state));
  }

  private cardKey(item: QueueItem): string {
    return `${item.cve_id}/${item.cwe}`;
  }

  private render(state: ReviewState): void {
    this.root.textContent = '';

    const header = el('header', {});
    header.appendChild(el('h1', {}, 'Weakness mapping review'));
    header.appendChild(
      el('span', { 'data-testid': 'pending-count' }, `${state.pending} pending`),
    );
    const reload = el('button', { 'data-testid': 'reload' }, 'Reload');
    reload.addEventListener('click', () => void this.controller.load());
    header.appendChild(reload);
    this.root.appendChild(header);

    if (state.banner !== 'none') {
      const banner = el(
        'div',
        { class: `banner banner-${state.banner}`, 'data-testid': 'banner', role: 'alert' },
        `${BANNER_TEXT[state.banner] ?? 'Problem.'} ${state.bannerDetail}`.trim(),
      );
      if (state.banner === 'connectivity') {
        const retry = el('button', { 'data-testid': 'retry' }, 'Retry');
        retry.addEventListener('click', () => void this.controller.load());
        banner.appendChild(retry);
      }
      this.root.appendChild(banner);
      if (state.banner === 'no-model') return; // blocking notice
    }

    if (state.loading) {
      this.root.appendChild(el('p', { 'data-testid': 'loading' }, 'Loading queue…'));
      return;
    }

    if (state.allReviewed && state.items.length === 0) {
      this.root.appendChild(
        el('p', { class: 'all-reviewed', 'data-testid': 'all-reviewed' }, 'All mappings reviewed.'),
      );
      return;
    }

    const list = el('div', { class: 'cards', 'data-testid': 'cards' });
    for (const item of state.items) list.appendChild(this.renderCard(item));
    this.root.appendChild(list);

    if (state.nextCursor) {
      const more = el('button', { 'data-testid': 'load-more' }, 'Load more');
      more.addEventListener('click', () => void this.controller.loadMore());
      this.root.appendChild(more);
    }
  }

  private renderCard(item: QueueItem): HTMLElement {
    const key = this.cardKey(item);
    const card = el('article', { class: 'card', 'data-testid': 'card', 'data-key': key });

    card.appendChild(el('h2', {}, item.cve_id));
    card.appendChild(el('p', { class: 'description' }, item.description));

    const prediction = el('div', { class: 'prediction' });
    prediction.appendChild(
      el('strong', { 'data-testid': 'predicted-cwe' }, `CWE-${item.cwe} ${item.cwe_name}`),
    );
    prediction.appendChild(
      el(
        'span',
        { 'data-testid': 'score' },
        ` score ${item.score.toFixed(3)}${item.fallback ? ' (fallback pick)' : ''}`,
      ),
    );
    prediction.appendChild(
      el(
        'div',
        { class: 'path', 'data-testid': 'path' },
        `path: ${item.path.map((cwe) => `CWE-${cwe}`).join(' → ')}`,
      ),
    );
    card.appendChild(prediction);

    const controls = el('div', { class: 'controls' });
    const accept = el('button', { 'data-testid': 'accept' }, 'Accept');
    accept.addEventListener('click', () => void this.controller.submit(item, 'accept'));
    const reject = el('button', { 'data-testid': 'reject' }, 'Reject');
    reject.addEventListener('click', () => void this.controller.submit(item, 'reject'));
    controls.appendChild(accept);
    controls.appendChild(reject);
    card.appendChild(controls);

    card.appendChild(this.renderReplacePicker(item, key));
    return card;
  }

  private renderReplacePicker(item: QueueItem, key: string): HTMLElement {
    const wrap = el('div', { class: 'replace' });
    const input = el('input', {
      type: 'search',
      placeholder: 'Search weaknesses…',
      'data-testid': 'cwe-search',
    });
    const results = el('ul', { class: 'picker-results', 'data-testid': 'picker-results' });
    const chosen = el('span', { 'data-testid': 'chosen-cwe' }, this.chosenLabel(key));
    const submit = el('button', { 'data-testid': 'replace' }, 'Replace');
    submit.toggleAttribute('disabled', !this.pickerChoice.has(key));

    input.addEventListener('input', () => {
      void (async () => {
        const query = input.value.trim();
        const matches = query ? await this.api.searchCwes(query) : [];
        this.pickerResults.set(key, matches);
        results.textContent = '';
        for (const match of matches) {
          const row = el(
            'li',
            { 'data-testid': 'picker-option', 'data-cwe': String(match.id) },
            `CWE-${match.id} ${match.name}`,
          );
          row.addEventListener('click', () => {
            this.pickerChoice.set(key, match.id);
            chosen.textContent = this.chosenLabel(key);
            submit.toggleAttribute('disabled', false);
          });
          results.appendChild(row);
        }
      })();
    });

    submit.addEventListener('click', () => {
      const replacement = this.pickerChoice.get(key);
      if (replacement === undefined) return; // disabled guard
      this.pickerChoice.delete(key);
      void this.controller.submit(item, 'replace' as Verdict, replacement);
    });

    wrap.appendChild(input);
    wrap.appendChild(results);
    wrap.appendChild(chosen);
    wrap.appendChild(submit);
    return wrap;
  }

  private chosenLabel(key: string): string {
    const choice = this.pickerChoice.get(key);
    return choice === undefined ? 'no replacement chosen' : `replace with CWE-${choice}`;
  }
}
