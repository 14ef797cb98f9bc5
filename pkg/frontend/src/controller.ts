/**
 * Queue state and verdict submission with optimistic removal.
 *
 * A submitted card leaves the queue immediately; anything but a 201 from the
 * service rolls the card back (409 duplicates surface as a conflict notice).
 */

import { ApiError, type FeedbackRecord, type QueueItem, type ReviewApi, type Verdict } from './api.js';

export type BannerKind = 'none' | 'connectivity' | 'no-model' | 'conflict' | 'error';

export interface ReviewState {
  items: QueueItem[];
  nextCursor: string | null;
  pending: number;
  loading: boolean;
  banner: BannerKind;
  bannerDetail: string;
  allReviewed: boolean;
}

export type Listener = (state: ReviewState) => void;

const PAGE_LIMIT = 20;

export class ReviewController {
  private state: ReviewState = {
    items: [],
    nextCursor: null,
    pending: 0,
    loading: false,
    banner: 'none',
    bannerDetail: '',
    allReviewed: false,
  };
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ReviewApi,
    private readonly reviewer: string,
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.snapshot());
  }

  snapshot(): ReviewState {
    return { ...this.state, items: [...this.state.items] };
  }

  private update(patch: Partial<ReviewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.snapshot());
  }

  /** Load the first queue page (clears any previous items). */
  async load(): Promise<void> {
    this.update({ loading: true, banner: 'none', bannerDetail: '' });
    try {
      const page = await this.api.fetchQueue(PAGE_LIMIT);
      this.update({
        items: page.items,
        nextCursor: page.next_cursor,
        pending: page.pending,
        loading: false,
        allReviewed: page.items.length === 0,
      });
    } catch (err) {
      this.handleLoadError(err);
    }
  }

  /** Fetch the next page and append it. */
  async loadMore(): Promise<void> {
    if (!this.state.nextCursor || this.state.loading) return;
    this.update({ loading: true });
    try {
      const page = await this.api.fetchQueue(PAGE_LIMIT, this.state.nextCursor);
      this.update({
        items: [...this.state.items, ...page.items],
        nextCursor: page.next_cursor,
        pending: page.pending,
        loading: false,
      });
    } catch (err) {
      this.handleLoadError(err);
    }
  }

  private handleLoadError(err: unknown): void {
    if (err instanceof ApiError && err.status === 409) {
      this.update({ loading: false, banner: 'no-model', bannerDetail: err.detail, items: [] });
      return;
    }
    const detail = err instanceof Error ? err.message : String(err);
    this.update({ loading: false, banner: 'connectivity', bannerDetail: detail });
  }

  /**
   * Submit a verdict for a card. The card is removed optimistically and
   * restored (at its original position) unless the service answers 201.
   */
  async submit(item: QueueItem, verdict: Verdict, replacementCwe?: number): Promise<FeedbackRecord | null> {
    if (verdict === 'replace' && replacementCwe === undefined) {
      throw new Error('replace verdict requires a replacement CWE');
    }
    const index = this.state.items.findIndex(
      (candidate) => candidate.cve_id === item.cve_id && candidate.cwe === item.cwe,
    );
    if (index < 0) return null;

    const optimistic = [...this.state.items];
    optimistic.splice(index, 1);
    this.update({
      items: optimistic,
      pending: Math.max(0, this.state.pending - 1),
      banner: 'none',
      bannerDetail: '',
      allReviewed: optimistic.length === 0 && !this.state.nextCursor,
    });

    try {
      return await this.api.submitFeedback({
        cve_id: item.cve_id,
        proposed_cwe: item.cwe,
        verdict,
        replacement_cwe: replacementCwe,
        reviewer: this.reviewer,
      });
    } catch (err) {
      const rolledBack = [...this.state.items];
      rolledBack.splice(Math.min(index, rolledBack.length), 0, item);
      const conflict = err instanceof ApiError && err.status === 409;
      this.update({
        items: rolledBack,
        pending: this.state.pending + 1,
        banner: conflict ? 'conflict' : 'error',
        bannerDetail: err instanceof Error ? err.message : String(err),
        allReviewed: false,
      });
      return null;
    }
  }
}
