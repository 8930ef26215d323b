import type { AuditEntryDto, DaemonStatusDto, PendingPromptDto, PromptChoice } from './types.js';

export class ConflictError extends Error {
  constructor(
    message: string,
    readonly resolution: string | null,
  ) {
    super(message);
    this.name = 'ConflictError';
  }
}

type FetchLike = typeof fetch;

/**
 * Thin client over the daemon's local API. The fetch implementation is
 * injected so tests can run without a daemon.
 */
export class DaemonClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!resp.ok) throw new Error(`GET ${path}: ${resp.status}`);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (resp.status === 409) {
      const payload = (await resp.json()) as { error?: string; resolution?: string | null };
      throw new ConflictError(payload.error ?? 'conflict', payload.resolution ?? null);
    }
    if (!resp.ok) throw new Error(`POST ${path}: ${resp.status}`);
    return (await resp.json()) as T;
  }

  async status(): Promise<DaemonStatusDto> {
    return this.getJson<DaemonStatusDto>('/status');
  }

  async pending(): Promise<PendingPromptDto[]> {
    const data = await this.getJson<{ prompts: PendingPromptDto[] }>('/pending');
    return data.prompts;
  }

  /** Answer a prompt. Throws ConflictError when it already resolved (e.g. timed out). */
  async submitDecision(promptId: string, choice: PromptChoice): Promise<void> {
    await this.postJson('/decision', { prompt_id: promptId, choice });
  }

  async audit(since = 0): Promise<AuditEntryDto[]> {
    const data = await this.getJson<{ entries: AuditEntryDto[] }>(`/audit?since=${since}`);
    return data.entries;
  }

  async whitelist(): Promise<string[]> {
    const data = await this.getJson<{ entries: string[] }>('/whitelist');
    return data.entries;
  }

  async addToWhitelist(appId: string): Promise<string[]> {
    const data = await this.postJson<{ entries: string[] }>('/whitelist', { add: [appId] });
    return data.entries;
  }

  async removeFromWhitelist(appId: string): Promise<string[]> {
    const data = await this.postJson<{ entries: string[] }>('/whitelist', { remove: [appId] });
    return data.entries;
  }

  thumbnailUrl(promptId: string): string {
    return `${this.baseUrl}/thumbnail?prompt_id=${encodeURIComponent(promptId)}`;
  }
}
