import { ApiClient, ApiError } from "./api.js";
import { loadConfig, newSession } from "./config.js";
import {
  renderDetail,
  renderErrorBanner,
  renderQueue,
  renderRetryAffordance,
  renderSubmitResult,
} from "./render.js";
import type { ConsoleSession } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function main() {
  const config = await loadConfig();
  const tokenInput = el("token") as HTMLInputElement;
  let session: ConsoleSession = newSession(config);
  let client = new ApiClient(session.baseUrl, session.token);
  let labelOrder: string[] = [];

  tokenInput.addEventListener("change", () => {
    session = { ...session, token: tokenInput.value || null };
    client = new ApiClient(session.baseUrl, session.token);
  });

  async function refreshPalette() {
    const models = await client.models();
    labelOrder = models.label_order ?? [];
  }

  async function submit() {
    const textarea = el("complaint") as HTMLTextAreaElement;
    const output = el("result");
    if (!textarea.value.trim()) {
      output.innerHTML = `<div class="banner banner-error">enter a complaint first</div>`;
      return; // client-side validation, no request
    }
    try {
      if (labelOrder.length === 0) await refreshPalette();
      const res = await client.classify(textarea.value);
      output.innerHTML = renderSubmitResult(res.prediction, res.anonymized_text, labelOrder);
    } catch (err) {
      output.innerHTML =
        err instanceof ApiError ? renderErrorBanner(err.status, err.body) : renderRetryAffordance();
    }
  }

  async function showQueue(offset = 0) {
    const output = el("queue-view");
    try {
      const page = await client.submissions(50, offset);
      output.innerHTML = renderQueue(page);
    } catch (err) {
      output.innerHTML =
        err instanceof ApiError ? renderErrorBanner(err.status, err.body) : renderRetryAffordance();
    }
  }

  async function showDetail(id: string) {
    const page = await client.submissions(500, 0);
    const item = page.items.find((s) => s.id === id);
    const output = el("detail-view");
    if (!item) {
      output.innerHTML = `<div class="banner banner-error">submission not found</div>`;
      return;
    }
    if (labelOrder.length === 0) await refreshPalette();
    output.innerHTML = renderDetail(item, labelOrder);
  }

  el("submit-button").addEventListener("click", submit);
  el("queue-view").addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest(".queue-row");
    if (row) void showDetail(row.getAttribute("data-id") ?? "");
  });
  el("detail-view").addEventListener("click", async (event) => {
    const button = (event.target as HTMLElement).closest(".relabel");
    if (!button) return;
    const id = button.getAttribute("data-id") ?? "";
    const label = button.getAttribute("data-label") ?? "";
    try {
      await client.review(id, label);
    } catch (err) {
      if (err instanceof ApiError) {
        el("detail-view").insertAdjacentHTML("afterbegin", renderErrorBanner(err.status, err.body));
        return;
      }
      throw err;
    }
    await showDetail(id); // server truth, no optimistic update
  });
  // other operators may relabel concurrently; refetch reconciles
  window.addEventListener("focus", () => void showQueue());

  await showQueue();
}

void main();
