import { DaemonClient } from './api.js';
import { ConsoleController } from './app.js';
import { AUDIT_PAGE_SIZE, filterAudit } from './audit.js';
import { categoryLabel, formatCountdown } from './prompts.js';
import type { AuditEntryDto, PromptCard } from './types.js';

const client = new DaemonClient(window.location.origin.replace(/\/$/, ''));
const controller = new ConsoleController(client);

const el = (id: string) => document.getElementById(id)!;

let auditEntries: AuditEntryDto[] = [];
let auditPage = 0;

function esc(text: string): string {
  const div = document.createElement('div');
  div.textContent = text;
  return div.innerHTML;
}

function renderCards(cards: PromptCard[]): void {
  const container = el('prompts');
  if (cards.length === 0) {
    container.innerHTML = '<div class="empty">No pending prompts</div>';
    return;
  }
  container.innerHTML = cards
    .map(({ prompt, remainingMs }) => {
      const label = categoryLabel(prompt.category);
      return `
      <div class="card" data-id="${esc(prompt.prompt_id)}">
        <img class="thumb" src="${client.thumbnailUrl(prompt.prompt_id)}" alt="photo"
             onerror="this.classList.add('placeholder')">
        <div class="card-body">
          <div class="card-head">
            <span class="badge">${esc(label)}</span>
            <span class="app">${esc(prompt.app_id)}</span>
            <span class="countdown" data-created="${prompt.created_at}"
                  data-timeout="${prompt.timeout_ms}">${formatCountdown(remainingMs)}</span>
          </div>
          <div class="alert-text">${esc(prompt.alert_text)}</div>
          <div class="path">${esc(prompt.photo_path)}</div>
          <div class="actions">
            <button class="deny" data-choice="deny">Deny</button>
            <button class="allow" data-choice="allow">Allow</button>
          </div>
        </div>
      </div>`;
    })
    .join('');
  container.querySelectorAll<HTMLButtonElement>('button[data-choice]').forEach((button) => {
    button.addEventListener('click', () => {
      const card = button.closest<HTMLElement>('.card')!;
      const choice = button.dataset.choice as 'allow' | 'deny';
      card.querySelectorAll('button').forEach((b) => (b.disabled = true));
      void controller.decide(card.dataset.id!, choice).then(() => void controller.refreshAudit());
    });
  });
}

function renderAudit(): void {
  const filter = {
    app: (el('audit-app') as HTMLInputElement).value,
    verdict: (el('audit-verdict') as HTMLSelectElement).value,
  };
  const page = filterAudit(auditEntries, filter, auditPage, AUDIT_PAGE_SIZE);
  auditPage = page.page;
  el('audit-meta').textContent = `${page.total} entries, page ${page.page + 1}/${page.pageCount}`;
  const rows = page.entries
    .map(
      (entry) => `
      <tr class="verdict-${esc(entry.verdict)}">
        <td>${new Date(entry.timestamp).toLocaleTimeString()}</td>
        <td>${esc(entry.app_id)}</td>
        <td class="path">${esc(entry.photo_path)}</td>
        <td>${esc(entry.category ?? '-')}</td>
        <td>${esc(entry.verdict)}</td>
        <td>${esc(entry.reason)}</td>
      </tr>`,
    )
    .join('');
  el('audit-rows').innerHTML = rows || '<tr><td colspan="6" class="empty">No entries</td></tr>';
}

function renderWhitelist(entries: string[]): void {
  el('whitelist-items').innerHTML = entries
    .map(
      (appId) => `
      <li><code>${esc(appId)}</code>
        <button class="remove" data-app="${esc(appId)}">remove</button></li>`,
    )
    .join('');
  el('whitelist-items')
    .querySelectorAll<HTMLButtonElement>('button.remove')
    .forEach((button) =>
      button.addEventListener('click', () => void controller.removeWhitelistEntry(button.dataset.app!)),
    );
}

function toast(message: string): void {
  const box = el('toast');
  box.textContent = message;
  box.classList.add('visible');
  setTimeout(() => box.classList.remove('visible'), 4000);
}

controller.on('cards', renderCards);
controller.on('connection', (up) => el('banner').classList.toggle('visible', !up));
controller.on('toast', toast);
controller.on('audit', (entries) => {
  auditEntries = entries;
  renderAudit();
});
controller.on('whitelist', renderWhitelist);

el('audit-app').addEventListener('input', () => {
  auditPage = 0;
  renderAudit();
});
el('audit-verdict').addEventListener('change', () => {
  auditPage = 0;
  renderAudit();
});
el('audit-prev').addEventListener('click', () => {
  auditPage = Math.max(0, auditPage - 1);
  renderAudit();
});
el('audit-next').addEventListener('click', () => {
  auditPage += 1;
  renderAudit();
});
el('audit-refresh').addEventListener('click', () => void controller.refreshAudit());
el('whitelist-add').addEventListener('click', () => {
  const input = el('whitelist-input') as HTMLInputElement;
  void controller.addWhitelistEntry(input.value).then(() => (input.value = ''));
});

// countdown ticker between polls
setInterval(() => controller.tick(), 250);

controller.start();
void controller.refreshAudit();
void controller.refreshWhitelist();
