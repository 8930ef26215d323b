import type { PendingPromptDto } from '../src/types';

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export interface FakeDaemon {
  fetchFn: typeof fetch;
  calls: RecordedCall[];
  pending: PendingPromptDto[];
  whitelist: string[];
  audit: unknown[];
  failNetwork: boolean;
  conflictOnDecision: string | null; // resolution value to report
}

export function makePrompt(overrides: Partial<PendingPromptDto> = {}): PendingPromptDto {
  return {
    prompt_id: 'prompt-1',
    app_id: 'gallery',
    photo_path: '/photos/holiday.jpg',
    category: 'nude',
    alert_text: 'This photo contains: nude',
    created_at: 1_000_000,
    timeout_ms: 30_000,
    ...overrides,
  };
}

/** In-memory daemon double speaking the same JSON shapes over a fake fetch. */
export function fakeDaemon(): FakeDaemon {
  const daemon: FakeDaemon = {
    calls: [],
    pending: [],
    whitelist: [],
    audit: [],
    failNetwork: false,
    conflictOnDecision: null,
    fetchFn: undefined as unknown as typeof fetch,
  };

  daemon.fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    daemon.calls.push({ url, method, body });
    if (daemon.failNetwork) throw new TypeError('fetch failed');

    const json = (payload: unknown, status = 200) =>
      new Response(JSON.stringify(payload), { status, headers: { 'Content-Type': 'application/json' } });

    if (url.endsWith('/pending')) return json({ prompts: daemon.pending });
    if (url.includes('/audit')) return json({ entries: daemon.audit });
    if (url.endsWith('/whitelist') && method === 'GET') return json({ entries: daemon.whitelist });
    if (url.endsWith('/whitelist') && method === 'POST') {
      const record = body as { add?: string[]; remove?: string[] };
      for (const appId of record.add ?? []) {
        if (!daemon.whitelist.includes(appId)) daemon.whitelist.push(appId);
      }
      daemon.whitelist = daemon.whitelist.filter((e) => !(record.remove ?? []).includes(e));
      daemon.whitelist.sort();
      return json({ entries: daemon.whitelist });
    }
    if (url.endsWith('/decision')) {
      if (daemon.conflictOnDecision !== null) {
        return json({ error: 'already resolved', resolution: daemon.conflictOnDecision }, 409);
      }
      const record = body as { prompt_id: string };
      daemon.pending = daemon.pending.filter((p) => p.prompt_id !== record.prompt_id);
      return json({ prompt_id: record.prompt_id, resolved: (body as { choice: string }).choice });
    }
    if (url.endsWith('/status')) {
      return json({
        status: 'ok',
        records: 0,
        pending: daemon.pending.length,
        started_at: 0,
        library_root: '/photos',
        prompt_timeout_s: 30,
      });
    }
    return json({ error: 'not found' }, 404);
  }) as typeof fetch;

  return daemon;
}

export function decisionCalls(daemon: FakeDaemon): RecordedCall[] {
  return daemon.calls.filter((c) => c.url.endsWith('/decision'));
}
