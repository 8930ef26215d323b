import { describe, expect, it } from 'vitest';

import { PromptTracker, categoryLabel, formatCountdown } from '../src/prompts';
import { makePrompt } from './helpers';

describe('PromptTracker', () => {
  it('adds cards for newly listed prompts', () => {
    const tracker = new PromptTracker();
    const result = tracker.reconcile([makePrompt()], 1_000_500);
    expect(result.addedIds).toEqual(['prompt-1']);
    expect(result.cards).toHaveLength(1);
    expect(result.cards[0].remainingMs).toBe(29_500);
  });

  it('removes cards the daemon stopped listing (resolved elsewhere)', () => {
    const tracker = new PromptTracker();
    tracker.reconcile([makePrompt()], 1_000_000);
    const result = tracker.reconcile([], 1_001_000);
    expect(result.removedIds).toEqual(['prompt-1']);
    expect(result.cards).toHaveLength(0);
  });

  it('drops a card locally once its countdown hits zero', () => {
    const tracker = new PromptTracker();
    tracker.reconcile([makePrompt({ timeout_ms: 1000 })], 1_000_000);
    expect(tracker.cards(1_000_900)).toHaveLength(1);
    expect(tracker.cards(1_001_001)).toHaveLength(0);
    // still known: only the daemon decides its fate
    expect(tracker.has('prompt-1')).toBe(true);
  });

  it('orders cards oldest first', () => {
    const tracker = new PromptTracker();
    tracker.reconcile(
      [
        makePrompt({ prompt_id: 'b', created_at: 2_000_000, timeout_ms: 60_000 }),
        makePrompt({ prompt_id: 'a', created_at: 1_999_000, timeout_ms: 60_000 }),
      ],
      2_000_100,
    );
    expect(tracker.cards(2_000_100).map((c) => c.prompt.prompt_id)).toEqual(['a', 'b']);
  });

  it('forgets answered prompts immediately via drop', () => {
    const tracker = new PromptTracker();
    tracker.reconcile([makePrompt()], 1_000_000);
    tracker.drop('prompt-1');
    expect(tracker.cards(1_000_000)).toHaveLength(0);
  });
});

describe('display helpers', () => {
  it('formats countdowns as m:ss', () => {
    expect(formatCountdown(29_500)).toBe('0:30');
    expect(formatCountdown(61_000)).toBe('1:01');
    expect(formatCountdown(-5)).toBe('0:00');
  });

  it('renders category labels, including the unclassified fallback', () => {
    expect(categoryLabel('nude')).toBe('Nude');
    expect(categoryLabel('photo_id')).toBe('Photo Id');
    expect(categoryLabel('legal_document')).toBe('Legal Document');
    expect(categoryLabel(null)).toBe('Unclassified');
  });
});
