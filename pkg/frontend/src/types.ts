export type View = "submit" | "queue" | "detail";

export interface ConsoleSession {
  baseUrl: string;
  /** bearer token; must never appear in rendered markup or logs */
  token: string | null;
  view: View;
}

export interface Prediction {
  label: string;
  scores: Record<string, number>;
}

export interface ClassifyResponse {
  prediction: Prediction;
  anonymized_text: string;
  model_fingerprint: string;
  submission_id: string | null;
}

export interface SubmissionItem {
  id: string;
  received_at: number;
  updated_at: number;
  anonymized_text: string;
  prediction: Prediction;
  status: "auto_classified" | "reviewed";
  operator_feedback: string | null;
}

export interface SubmissionPage {
  total: number;
  limit: number;
  offset: number;
  items: SubmissionItem[];
}

export interface ReviewResponse {
  id: string;
  status: string;
  operator_feedback: string;
  updated_at: number;
}

export interface HealthResponse {
  status: "ok" | "degraded";
  model_fingerprint: string | null;
  uptime_seconds: number;
  privacy_mode: boolean;
}

export interface ModelsResponse {
  loaded_fingerprint: string | null;
  label_order: string[] | null;
  checkpoints: { path: string; model_id: string; label_order: string[]; fingerprint: string }[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: string;
}
