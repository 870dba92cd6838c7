/** Thin typed client over the documented HTTP JSON API. */

import type {
  ApiResult,
  DecisionBody,
  Level,
  Stats,
  Tag,
  TriagePage,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Request body for a decision; optional fields are omitted, not nulled. */
export function buildDecisionBody(
  tag: Tag,
  newLabel: Level | null,
  annotator: string,
): DecisionBody {
  const body: DecisionBody = { tag };
  if (tag === "Modify" && newLabel) {
    body.new_label = newLabel;
  }
  if (annotator) {
    body.annotator = annotator;
  }
  return body;
}

async function toResult<T>(response: Response): Promise<ApiResult<T>> {
  if (response.ok) {
    return { ok: true, status: response.status, data: (await response.json()) as T };
  }
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const payload = (await response.json()) as { detail?: unknown };
    if (typeof payload.detail === "string") {
      detail = payload.detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return { ok: false, status: response.status, detail };
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async listTriage(
    status: "pending" | "decided",
    page: number,
    pageSize: number,
  ): Promise<ApiResult<TriagePage>> {
    const params = new URLSearchParams({
      status,
      page: String(page),
      page_size: String(pageSize),
    });
    const response = await this.fetchFn(`${this.baseUrl}/api/triage?${params}`);
    return toResult<TriagePage>(response);
  }

  async submitDecision(
    sentenceId: string,
    body: DecisionBody,
  ): Promise<ApiResult<{ sentence_id: string; tag: string }>> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/triage/${encodeURIComponent(sentenceId)}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    return toResult(response);
  }

  async stats(): Promise<ApiResult<Stats>> {
    const response = await this.fetchFn(`${this.baseUrl}/api/stats`);
    return toResult<Stats>(response);
  }
}
