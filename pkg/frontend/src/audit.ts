import type { AuditEntryDto } from './types.js';

export interface AuditFilter {
  app: string; // empty = all
  verdict: string; // empty = all
}

export interface AuditPage {
  entries: AuditEntryDto[];
  page: number;
  pageCount: number;
  total: number;
}

export const AUDIT_PAGE_SIZE = 25;

/** Newest first, filterable by app id substring and exact verdict. */
export function filterAudit(
  entries: AuditEntryDto[],
  filter: AuditFilter,
  page: number,
  pageSize: number = AUDIT_PAGE_SIZE,
): AuditPage {
  const matching = entries
    .filter((e) => (filter.app === '' ? true : e.app_id.includes(filter.app)))
    .filter((e) => (filter.verdict === '' ? true : e.verdict === filter.verdict))
    .slice()
    .sort((a, b) => b.timestamp - a.timestamp);
  const pageCount = Math.max(1, Math.ceil(matching.length / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    entries: matching.slice(clamped * pageSize, (clamped + 1) * pageSize),
    page: clamped,
    pageCount,
    total: matching.length,
  };
}
