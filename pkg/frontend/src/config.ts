import type { ConsoleSession } from "./types.js";

export interface RuntimeConfig {
  apiBaseUrl: string;
}

/** Runtime config is a static file next to the bundle; no rebuild needed
 * to point the console at a different service. */
export async function loadConfig(
  fetchFn: (input: string) => Promise<Response> = fetch,
): Promise<RuntimeConfig> {
  const res = await fetchFn("./config.json");
  if (!res.ok) throw new Error(`config.json unavailable (status ${res.status})`);
  const data = await res.json();
  if (typeof data.apiBaseUrl !== "string" || !data.apiBaseUrl) {
    throw new Error("config.json: apiBaseUrl missing");
  }
  return { apiBaseUrl: data.apiBaseUrl.replace(/\/$/, "") };
}

export function newSession(config: RuntimeConfig, token: string | null = null): ConsoleSession {
  return { baseUrl: config.apiBaseUrl, token, view: "submit" };
}
