import { ConflictError, DaemonClient } from './api.js';
import { PromptTracker } from './prompts.js';
import type { AuditEntryDto, PromptCard, PromptChoice } from './types.js';

export interface ConsoleEvents {
  cards: (cards: PromptCard[]) => void;
  connection: (up: boolean) => void;
  toast: (message: string) => void;
  audit: (entries: AuditEntryDto[]) => void;
  whitelist: (entries: string[]) => void;
}

export const DEFAULT_POLL_INTERVAL_MS = 1000;

/**
 * Headless console controller: polling, decisions, whitelist, audit.
 *
 * All daemon interaction funnels through here; the DOM layer only renders
 * the events. Nothing in this class ever answers a prompt by itself: the
 * operator's click is the only path to submitDecision.
 */
export class ConsoleController {
  readonly tracker = new PromptTracker();
  private listeners: { [K in keyof ConsoleEvents]: ConsoleEvents[K][] } = {
    cards: [],
    connection: [],
    toast: [],
    audit: [],
    whitelist: [],
  };
  private timer: ReturnType<typeof setInterval> | null = null;
  private connected = true;

  constructor(
    private readonly client: DaemonClient,
    private readonly now: () => number = Date.now,
    readonly pollIntervalMs: number = DEFAULT_POLL_INTERVAL_MS,
  ) {}

  on<K extends keyof ConsoleEvents>(event: K, listener: ConsoleEvents[K]): void {
    this.listeners[event].push(listener);
  }

  private emit<K extends keyof ConsoleEvents>(event: K, payload: Parameters<ConsoleEvents[K]>[0]): void {
    for (const listener of this.listeners[event]) (listener as (p: unknown) => void)(payload);
  }

  start(): void {
    if (this.timer) return;
    void this.pollOnce();
    this.timer = setInterval(() => void this.pollOnce(), this.pollIntervalMs);
  }

  stop(): void {
    if (this.timer) clearInterval(this.timer);
    this.timer = null;
  }

  /** One poll: pending prompts in, cards out; connection banner on failure. */
  async pollOnce(): Promise<void> {
    try {
      const pending = await this.client.pending();
      if (!this.connected) {
        this.connected = true;
        this.emit('connection', true);
      }
      const result = this.tracker.reconcile(pending, this.now());
      this.emit('cards', result.cards);
    } catch {
      // Unreachable daemon: show the banner and keep the queue as-is.
      // Never allow anything silently; the daemon's own timeout governs.
      if (this.connected) {
        this.connected = false;
        this.emit('connection', false);
      }
    }
  }

  /** Refresh countdowns between polls without touching the network. */
  tick(): void {
    this.emit('cards', this.tracker.cards(this.now()));
  }

  async decide(promptId: string, choice: PromptChoice): Promise<void> {
    try {
      await this.client.submitDecision(promptId, choice);
      this.tracker.drop(promptId);
      this.emit('cards', this.tracker.cards(this.now()));
    } catch (err) {
      if (err instanceof ConflictError) {
        this.tracker.drop(promptId);
        this.emit('cards', this.tracker.cards(this.now()));
        const how = err.resolution ? ` (${err.resolution})` : '';
        this.emit('toast', `Prompt already resolved${how}`);
        return;
      }
      this.emit('toast', `Decision failed: ${(err as Error).message}`);
    }
  }

  async refreshAudit(since = 0): Promise<void> {
    try {
      this.emit('audit', await this.client.audit(since));
    } catch {
      this.emit('toast', 'Could not load audit log');
    }
  }

  async refreshWhitelist(): Promise<void> {
    try {
      this.emit('whitelist', await this.client.whitelist());
    } catch {
      this.emit('toast', 'Could not load whitelist');
    }
  }

  async addWhitelistEntry(appId: string): Promise<void> {
    if (!appId.trim()) return;
    this.emit('whitelist', await this.client.addToWhitelist(appId.trim()));
  }

  async removeWhitelistEntry(appId: string): Promise<void> {
    this.emit('whitelist', await this.client.removeFromWhitelist(appId));
  }
}
