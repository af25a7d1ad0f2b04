import type {
  ApiErrorBody,
  ClassifyResponse,
  HealthResponse,
  ModelsResponse,
  ReviewResponse,
  SubmissionPage,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client over the triage service; every method maps to one endpoint. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string | null = null,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(json: boolean): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["Content-Type"] = "application/json";
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(path: string, init: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, init);
    if (!res.ok) {
      let body: ApiErrorBody;
      try {
        body = (await res.json()) as ApiErrorBody;
      } catch {
        body = { code: "http_error", message: res.statusText || `status ${res.status}` };
      }
      throw new ApiError(res.status, body);
    }
    return res.json() as Promise<T>;
  }

  classify(text: string): Promise<ClassifyResponse> {
    return this.request("/classify", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ text }),
    });
  }

  anonymize(text: string): Promise<{ anonymized_text: string }> {
    return this.request("/anonymize", {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ text }),
    });
  }

  submissions(limit = 50, offset = 0): Promise<SubmissionPage> {
    return this.request(`/submissions?limit=${limit}&offset=${offset}`, {
      method: "GET",
      headers: this.headers(false),
    });
  }

  review(submissionId: string, correctedLabel: string): Promise<ReviewResponse> {
    return this.request(`/submissions/${encodeURIComponent(submissionId)}/review`, {
      method: "POST",
      headers: this.headers(true),
      body: JSON.stringify({ corrected_label: correctedLabel }),
    });
  }

  health(): Promise<HealthResponse> {
    return this.request("/health", { method: "GET", headers: this.headers(false) });
  }

  models(): Promise<ModelsResponse> {
    return this.request("/models", { method: "GET", headers: this.headers(false) });
  }
}
