import type { PendingPromptDto, PromptCard } from './types.js';

export interface ReconcileResult {
  cards: PromptCard[];
  addedIds: string[];
  removedIds: string[];
}

/**
 * Tracks which prompts are on screen and for how much longer.
 *
 * The tracker only mirrors daemon state: when a countdown reaches zero the
 * card is hidden (the daemon's timeout-deny is already underway), but no
 * decision is ever sent on the operator's behalf.
 */
export class PromptTracker {
  private known = new Map<string, PendingPromptDto>();

  reconcile(pending: PendingPromptDto[], now: number): ReconcileResult {
    const incoming = new Map(pending.map((p) => [p.prompt_id, p]));
    const addedIds: string[] = [];
    const removedIds: string[] = [];

    for (const id of this.known.keys()) {
      if (!incoming.has(id)) removedIds.push(id);
    }
    for (const [id, prompt] of incoming) {
      if (!this.known.has(id)) addedIds.push(id);
      this.known.set(id, prompt);
    }
    for (const id of removedIds) this.known.delete(id);

    return { cards: this.cards(now), addedIds, removedIds };
  }

  /** Current cards; locally-expired ones are dropped without any decision. */
  cards(now: number): PromptCard[] {
    const out: PromptCard[] = [];
    for (const prompt of this.known.values()) {
      const remainingMs = prompt.created_at + prompt.timeout_ms - now;
      if (remainingMs > 0) out.push({ prompt, remainingMs });
    }
    out.sort((a, b) => a.prompt.created_at - b.prompt.created_at);
    return out;
  }

  /** Forget a card immediately (after the operator answered it). */
  drop(promptId: string): void {
    this.known.delete(promptId);
  }

  has(promptId: string): boolean {
    return this.known.has(promptId);
  }
}

export function formatCountdown(remainingMs: number): string {
  const totalSeconds = Math.max(0, Math.ceil(remainingMs / 1000));
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, '0')}`;
}

export function categoryLabel(category: string | null): string {
  if (category === null) return 'Unclassified';
  return category
    .split('_')
    .map((w) => w.charAt(0).toUpperCase() + w.slice(1))
    .join(' ');
}
