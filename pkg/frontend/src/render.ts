import type { ApiErrorBody, Prediction, SubmissionItem, SubmissionPage } from "./types.js";

const PLACEHOLDER = /<(PERSON|PHONE|EMAIL|ADDRESS|WEBSITE|MONEY)>/g;

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Anonymization preview: placeholder tokens highlighted, rest escaped. */
export function renderAnonymizedPreview(text: string): string {
  const parts: string[] = [];
  let last = 0;
  for (const match of text.matchAll(PLACEHOLDER)) {
    parts.push(escapeHtml(text.slice(last, match.index)));
    parts.push(`<mark class="placeholder">${escapeHtml(match[0])}</mark>`);
    last = (match.index ?? 0) + match[0].length;
  }
  parts.push(escapeHtml(text.slice(last)));
  return `<p class="preview">${parts.join("")}</p>`;
}

/** One bar per category in fixed label order; width is the score in percent. */
export function renderConfidenceBars(prediction: Prediction, labelOrder: string[]): string {
  const rows = labelOrder.map((label) => {
    const score = prediction.scores[label] ?? 0;
    const pct = (score * 100).toFixed(1);
    const top = label === prediction.label ? " top" : "";
    return (
      `<div class="bar-row${top}" data-label="${escapeHtml(label)}" data-score="${score}">` +
      `<span class="bar-label">${escapeHtml(label)}</span>` +
      `<div class="bar" style="width: ${pct}%"></div>` +
      `<span class="bar-value">${pct}%</span>` +
      `</div>`
    );
  });
  return `<div class="confidence-bars">${rows.join("")}</div>`;
}

export function renderSubmitResult(
  prediction: Prediction,
  anonymizedText: string,
  labelOrder: string[],
): string {
  return (
    `<section class="result">` +
    `<h2>Predicted: <strong class="predicted-label">${escapeHtml(prediction.label)}</strong></h2>` +
    renderAnonymizedPreview(anonymizedText) +
    renderConfidenceBars(prediction, labelOrder) +
    `</section>`
  );
}

export function renderErrorBanner(status: number, body: ApiErrorBody): string {
  if (status === 503) {
    return `<div class="banner banner-warn">model loading, try again shortly</div>`;
  }
  const detail = body.detail ? ` &mdash; ${escapeHtml(body.detail)}` : "";
  return (
    `<div class="banner banner-error" data-code="${escapeHtml(body.code)}">` +
    `${escapeHtml(body.code)}: ${escapeHtml(body.message)}${detail}</div>`
  );
}

export function renderRetryAffordance(): string {
  return `<div class="banner banner-error">network error <button class="retry">retry</button></div>`;
}

function statusChip(item: SubmissionItem): string {
  const cls = item.status === "reviewed" ? "chip chip-reviewed" : "chip chip-auto";
  const label = item.status === "reviewed" ? "reviewed" : "auto";
  return `<span class="${cls}">${label}</span>`;
}

export function renderQueue(page: SubmissionPage): string {
  if (page.items.length === 0) {
    return `<div class="queue empty">no submissions on this page</div>`;
  }
  const rows = page.items.map(
    (item) =>
      `<li class="queue-row" data-id="${escapeHtml(item.id)}">` +
      statusChip(item) +
      `<span class="queue-label">${escapeHtml(item.operator_feedback ?? item.prediction.label)}</span>` +
      `<span class="queue-text">${escapeHtml(item.anonymized_text)}</span>` +
      `</li>`,
  );
  const pages = Math.max(1, Math.ceil(page.total / page.limit));
  const current = Math.floor(page.offset / page.limit) + 1;
  return (
    `<ul class="queue">${rows.join("")}</ul>` +
    `<nav class="pager">page ${current} of ${pages} (${page.total} total)</nav>`
  );
}

/** Detail view: full score table plus a one-click relabel palette. */
export function renderDetail(item: SubmissionItem, labelOrder: string[]): string {
  const palette = labelOrder
    .map(
      (label) =>
        `<button class="relabel" data-id="${escapeHtml(item.id)}" data-label="${escapeHtml(label)}">` +
        `${escapeHtml(label)}</button>`,
    )
    .join("");
  return (
    `<section class="detail" data-id="${escapeHtml(item.id)}">` +
    statusChip(item) +
    renderAnonymizedPreview(item.anonymized_text) +
    renderConfidenceBars(item.prediction, labelOrder) +
    `<div class="palette">${palette}</div>` +
    `</section>`
  );
}
