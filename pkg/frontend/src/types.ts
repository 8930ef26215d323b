/** Wire types for the daemon's local API. */

export interface PendingPromptDto {
  prompt_id: string;
  app_id: string;
  photo_path: string;
  category: string | null;
  alert_text: string;
  created_at: number; // ms since epoch
  timeout_ms: number;
}

export interface AuditEntryDto {
  timestamp: number;
  app_id: string;
  photo_path: string;
  system: string;
  app_state: string;
  category: string | null;
  verdict: string;
  reason: string;
  prompt_latency_ms: number | null;
}

export interface DaemonStatusDto {
  status: string;
  records: number;
  pending: number;
  started_at: number | null;
  library_root: string;
  prompt_timeout_s: number;
}

export type PromptChoice = 'allow' | 'deny';

/** One rendered card: a pending prompt plus its countdown state. */
export interface PromptCard {
  prompt: PendingPromptDto;
  /** milliseconds until the daemon's own timeout-deny fires */
  remainingMs: number;
}
